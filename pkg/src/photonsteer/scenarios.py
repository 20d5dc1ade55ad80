"""Executable presets for each prepared state, plus machine-checkable reports.

Site naming: the photon travels toward Puebla ("PUE", Bob) on the path that
keeps horizontal polarization and toward New York ("NY", Alice) on the
vertical one, so the entangled preset reads (|PUE,H> + |NY,V>)/sqrt(2).
"""

from __future__ import annotations

import numpy as np

from . import measurement, steering
from .circuit import parse_circuit, run_circuit
from .core import BasisDecl, BasisKet, DensityOperator, StateVector
from .errors import BadParameters

ALICE_SITE = "NY"
BOB_SITE = "PUE"

# Preparation chain of the main experiment: heralded H photon, half-wave
# plate to 45 degrees, polarizing beam splitter fanning out to the two cities.
FIG1_CIRCUIT = """\
sites in NY PUE
source in H
hwp in 22.5
pbs in -> PUE NY
"""

# Same chain with the wave plate swapped for a q-plate.
QPLATE_CIRCUIT = """\
sites in NY PUE
oam -2 0 2
source in H
qplate in q=1
pbs in -> PUE NY
"""

PRESET_NAMES = ("eq1", "twc", "hardy", "qplate_tripartite", "noisy")


def eq1_state() -> StateVector:
    """(|PUE,H> + |NY,V>)/sqrt(2): internal-external entangled benchmark."""
    decl = BasisDecl((ALICE_SITE, BOB_SITE))
    s = 1.0 / np.sqrt(2.0)
    return StateVector.from_amplitudes(
        decl,
        {BasisKet.photon(BOB_SITE, "H"): s, BasisKet.photon(ALICE_SITE, "V"): s},
    )


def twc_state() -> StateVector:
    """One photon split over two paths, (|b1> + i|b2>)/sqrt(2), polarization H."""
    decl = BasisDecl(("b1", "b2"))
    s = 1.0 / np.sqrt(2.0)
    return StateVector.from_amplitudes(
        decl,
        {BasisKet.photon("b1", "H"): s, BasisKet.photon("b2", "H"): 1j * s},
    )


def hardy_state(q: float = 1.0 / np.sqrt(2.0), r: float = 1.0 / np.sqrt(2.0)) -> StateVector:
    """q|vac> + (i r/sqrt(2))|u1> + (r/sqrt(2))|u2> with q^2 + r^2 = 1."""
    if abs(q * q + r * r - 1.0) > 1e-10:
        raise BadParameters(f"need q^2 + r^2 = 1, got {q * q + r * r}")
    decl = BasisDecl(("u1", "u2"))
    s = r / np.sqrt(2.0)
    return StateVector.from_amplitudes(
        decl,
        {
            BasisKet.vacuum(): q,
            BasisKet.photon("u1", "H"): 1j * s,
            BasisKet.photon("u2", "H"): s,
        },
    )


def qplate_tripartite_state() -> StateVector:
    """(1/2)[|PUE,H>(|+2>+|-2>) + i|NY,V>(|+2>-|-2>)]: three entangled registers."""
    decl = BasisDecl((ALICE_SITE, BOB_SITE), oam=(-2, 0, 2))
    return StateVector.from_amplitudes(
        decl,
        {
            BasisKet.photon(BOB_SITE, "H", 2): 0.5,
            BasisKet.photon(BOB_SITE, "H", -2): 0.5,
            BasisKet.photon(ALICE_SITE, "V", 2): 0.5j,
            BasisKet.photon(ALICE_SITE, "V", -2): -0.5j,
        },
    )


def noisy_state(v: float) -> DensityOperator:
    """Visibility-v mixture of the benchmark two-qubit projector with white noise.

    Lives directly in the steering frame (polarization ⊗ Bob occupation);
    v = 1 reproduces the entangled preset, v = 0 is maximally mixed.
    """
    if not 0.0 <= v <= 1.0:
        raise BadParameters(f"visibility must be in [0, 1], got {v}")
    psi = np.zeros(4, dtype=complex)
    psi[0b01] = 1.0 / np.sqrt(2.0)  # |H> ⊗ occupied
    psi[0b10] = 1.0 / np.sqrt(2.0)  # |V> ⊗ empty
    rho = v * np.outer(psi, psi.conj()) + (1.0 - v) * np.eye(4) / 4.0
    return DensityOperator(steering.QUBIT_PAIR_LABELS, rho)


def preset(spec: str) -> StateVector | DensityOperator:
    """Resolve a preset id like ``eq1``, ``noisy:0.4`` or ``hardy:0.6,0.8``."""
    name, _, args = spec.partition(":")
    try:
        if name == "eq1":
            return eq1_state()
        if name == "twc":
            return twc_state()
        if name == "qplate_tripartite":
            return qplate_tripartite_state()
        if name == "hardy":
            if not args:
                return hardy_state()
            parts = [float(x) for x in args.split(",")]
            if len(parts) != 2:
                raise BadParameters(f"hardy takes q,r, got {args!r}")
            return hardy_state(*parts)
        if name == "noisy":
            if not args:
                raise BadParameters("noisy needs a visibility, e.g. noisy:0.4")
            return noisy_state(float(args))
    except ValueError as exc:
        raise BadParameters(f"bad preset parameters {spec!r}: {exc}") from exc
    raise BadParameters(f"unknown preset {name!r} (have {PRESET_NAMES})")


def steering_frame(spec_or_state, bob_site: str | None = None):
    """Two-qubit frame for a preset: the matrix and a short frame description."""
    if isinstance(spec_or_state, DensityOperator):
        return spec_or_state, "two-qubit"
    state = spec_or_state
    sites = state.decl.sites
    if bob_site is None:
        bob_site = BOB_SITE if BOB_SITE in sites else sites[-1]
    if abs(state.amps[0]) ** 2 > 1e-12 or _internal_is_path_marker(state):
        alice_site = next(s for s in sites if s != bob_site)
        rho = steering.occupation_qubits(state, alice_site, bob_site)
        return rho, f"occ-occ({alice_site},{bob_site})"
    rho = steering.pol_path_qubits(state, bob_site)
    return rho, f"pol-path(bob={bob_site})"


def _internal_is_path_marker(state: StateVector) -> bool:
    """True when every photon amplitude shares one polarization (path-only state)."""
    pols = {ket.pol for ket, _ in state.items(tol=1e-12) if not ket.is_vacuum}
    return len(pols) == 1


def _complex_pairs(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def scenario_report(preset_spec: str, site: str | None = None, basis: str | None = None) -> dict:
    """Render one measurement narrative as comparable data.

    The ``detector`` section is the Born table of the analyzer at ``site``
    (photon-space presets only): click labels, conditional states, and the
    photon-number readout of Bob's site for each branch. The ``assemblage``
    section gives the conditional Bob-qubit states for Alice settings Z and X
    together with the CJWR and CHSH values of the preset's two-qubit frame.
    """
    prepared = preset(preset_spec)
    report: dict = {"preset": preset_spec}

    if isinstance(prepared, StateVector):
        site = site or (ALICE_SITE if ALICE_SITE in prepared.decl.sites else prepared.decl.sites[0])
        basis = basis or "ZHV"
        if basis in ("ZHV", "Xdiag", "Ycirc"):
            setting = measurement.polarization_setting(site, basis)
        elif basis == "OAMpm":
            setting = measurement.oam_setting(site, "pm", prepared.decl.oam)
        elif basis == "occupation":
            setting = measurement.occupation_setting(site)
        else:
            raise BadParameters(f"unknown basis {basis!r}")

        bob_site = BOB_SITE if BOB_SITE in prepared.decl.sites else prepared.decl.sites[-1]
        outcomes = []
        for record in measurement.born_probabilities(prepared, setting):
            entry: dict = {"label": record.label, "probability": record.probability}
            if record.conditional_state is not None:
                entry["conditional_amplitudes"] = [
                    [ket.label(), [float(a.real), float(a.imag)]]
                    for ket, a in record.conditional_state.items(tol=1e-12)
                ]
                entry["bob_occupation_reduced"] = _complex_pairs(
                    measurement.reduced_state(record.conditional_state, "occupation", bob_site).matrix
                )
            outcomes.append(entry)
        report["detector"] = {
            "site": site,
            "basis": basis,
            "outcomes": outcomes,
            "bob_occupation_premeasurement": _complex_pairs(
                measurement.reduced_state(prepared, "occupation", bob_site).matrix
            ),
        }

    rho, frame = steering_frame(prepared)
    assemblage = steering.compute_assemblage(rho, ("Z", "X"))
    members = {}
    for x in assemblage.settings:
        for a in (+1, -1):
            member = assemblage.members[(x, a)]
            p = float(np.real(np.trace(member)))
            entry = {"probability": p, "member": _complex_pairs(member)}
            if p > 1e-12:
                entry["bob_conditional"] = _complex_pairs(member / p)
            members[f"{x}{'+' if a > 0 else '-'}"] = entry
    chsh = steering.chsh_value(rho, 0.0, 90.0, 45.0, 135.0)
    report["assemblage"] = {
        "frame": frame,
        "settings": list(assemblage.settings),
        "members": members,
        "no_signaling_residual": assemblage.no_signaling_residual(),
        "cjwr_zx": steering.cjwr_value(rho, ("Z", "X")),
        "chsh_standard_angles": {
            "value": chsh.value,
            "angles_deg": list(chsh.angles),
            "correlators": list(chsh.correlators),
        },
    }
    return report


def fig1_state() -> StateVector:
    """Run the preparation-chain circuit (independent route to the benchmark)."""
    return run_circuit(parse_circuit(FIG1_CIRCUIT))
