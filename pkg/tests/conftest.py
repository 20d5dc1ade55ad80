"""Shared helpers: seeded random states and independent reduction oracles."""

import numpy as np
import pytest

from photonsteer.core import BasisDecl, StateVector


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_state(decl: BasisDecl, rng, photon_only: bool = False) -> StateVector:
    """Haar-ish normalized state over the declared basis."""
    amps = rng.normal(size=decl.dim) + 1j * rng.normal(size=decl.dim)
    if photon_only:
        amps[0] = 0.0
    amps /= np.linalg.norm(amps)
    return StateVector(decl, amps)


def occupation_oracle(state: StateVector, site: str) -> np.ndarray:
    """Photon-number readout at one site by direct |amplitude|^2 summation."""
    out = np.zeros((2, 2), dtype=complex)
    for ket, amp in state.items():
        n = 0 if ket.is_vacuum or ket.site != site else 1
        out[n, n] += abs(amp) ** 2
    return out


def register_oracle(state: StateVector, register: str) -> np.ndarray:
    """Polarization/OAM reduction by explicit double loop with delta conditions."""
    if register == "pol":
        axis = ("H", "V")
        value = lambda k: k.pol
    else:
        axis = state.decl.oam
        value = lambda k: k.oam
    out = np.zeros((len(axis), len(axis)), dtype=complex)
    items = [(k, a) for k, a in state.items() if not k.is_vacuum]
    for k1, a1 in items:
        for k2, a2 in items:
            same_rest = (
                k1.site == k2.site
                and (register == "pol" or k1.pol == k2.pol)
                and (register == "oam" or k1.oam == k2.oam)
            )
            if same_rest:
                out[axis.index(value(k1)), axis.index(value(k2))] += a1 * np.conj(a2)
    return out
