"""State space and operator algebra for the vacuum ⊕ one-photon sector.

A basis declaration fixes a finite set of spatial modes (sites) and a finite
set of orbital-angular-momentum values. The Hilbert space is spanned by one
vacuum ket plus one ket per (site, polarization, oam) triple; multi-photon
configurations are unrepresentable by construction. Basis order is the vacuum
first, then one-photon kets sorted lexicographically by (site, pol, oam), so
matrix layouts are deterministic for golden tests.

Conventions fixed here and relied on everywhere else:

* Global phase is never stripped implicitly; ``fidelity`` is the
  phase-insensitive comparator.
* Polarization labels are "H" and "V", with H ordered before V.
* Partial-trace selectors name a physical register: a site's occupation,
  the polarization register, or the OAM register. Occupation reduction is
  the nondemolition photon-number readout and is therefore diagonal; the
  polarization and OAM registers exist only inside the one-photon sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from .errors import (
    BasisMismatch,
    DimensionMismatch,
    NonUnitary,
    UnknownSite,
    UnknownSubsystem,
    ZeroState,
)

ATOL = 1e-10  # algebraic invariants
NORM_ATOL = 1e-9  # pipeline accumulation headroom

POLS = ("H", "V")

DEFAULT_OAM = (0,)


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, order=True)
class BasisKet:
    """One basis element: the vacuum, or a photon at (site, pol, oam)."""

    site: str | None = None
    pol: str | None = None
    oam: int | None = None

    @classmethod
    def vacuum(cls) -> "BasisKet":
        return cls()

    @classmethod
    def photon(cls, site: str, pol: str, oam: int = 0) -> "BasisKet":
        if pol not in POLS:
            raise ValueError(f"polarization must be one of {POLS}, got {pol!r}")
        return cls(site=site, pol=pol, oam=int(oam))

    @property
    def is_vacuum(self) -> bool:
        return self.site is None

    def label(self) -> str:
        if self.is_vacuum:
            return "vac"
        return f"{self.site}:{self.pol}:{self.oam}"

    def __repr__(self) -> str:  # |vac> or |NY,H,0>
        if self.is_vacuum:
            return "|vac>"
        return f"|{self.site},{self.pol},{self.oam}>"


@dataclass(frozen=True)
class BasisDecl:
    """Declared site list and OAM value set; fixes the basis order."""

    sites: tuple[str, ...]
    oam: tuple[int, ...] = DEFAULT_OAM

    def __post_init__(self):
        if len(set(self.sites)) != len(self.sites):
            raise ValueError(f"duplicate site in declaration: {self.sites}")
        if len(self.oam) == 0 or len(set(self.oam)) != len(self.oam):
            raise ValueError(f"OAM set must be non-empty and duplicate-free: {self.oam}")
        object.__setattr__(self, "oam", tuple(sorted(int(m) for m in self.oam)))

    @cached_property
    def kets(self) -> tuple[BasisKet, ...]:
        photons = [
            BasisKet.photon(site, pol, m)
            for site in sorted(self.sites)
            for pol in POLS
            for m in self.oam
        ]
        return (BasisKet.vacuum(), *photons)

    @cached_property
    def index(self) -> dict[BasisKet, int]:
        return {ket: i for i, ket in enumerate(self.kets)}

    @property
    def dim(self) -> int:
        return 1 + 2 * len(self.sites) * len(self.oam)

    def require_site(self, site: str) -> None:
        if site not in self.sites:
            raise UnknownSite(f"site {site!r} not declared (have {self.sites})")


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over the declared basis.

    Not forcibly normalized at construction (``normalize`` exists for that);
    operations that require unit norm check it themselves.
    """

    decl: BasisDecl
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.amps, dtype=complex).reshape(-1)
        if arr.shape != (self.decl.dim,):
            raise BasisMismatch(
                f"amplitude vector has length {arr.shape[0]}, basis has {self.decl.dim}"
            )
        object.__setattr__(self, "amps", _frozen(arr))

    @classmethod
    def vacuum(cls, decl: BasisDecl) -> "StateVector":
        amps = np.zeros(decl.dim, dtype=complex)
        amps[0] = 1.0
        return cls(decl, amps)

    @classmethod
    def from_amplitudes(cls, decl: BasisDecl, amplitudes: Mapping[BasisKet, complex]) -> "StateVector":
        amps = np.zeros(decl.dim, dtype=complex)
        for ket, amp in amplitudes.items():
            idx = decl.index.get(ket)
            if idx is None:
                raise BasisMismatch(f"ket {ket!r} not in declared basis")
            amps[idx] = amp
        return cls(decl, amps)

    def amplitude(self, ket: BasisKet) -> complex:
        idx = self.decl.index.get(ket)
        if idx is None:
            raise BasisMismatch(f"ket {ket!r} not in declared basis")
        return complex(self.amps[idx])

    def items(self, tol: float = 0.0) -> Iterator[tuple[BasisKet, complex]]:
        """Nonzero (ket, amplitude) pairs in basis order."""
        for ket, amp in zip(self.decl.kets, self.amps):
            if abs(amp) > tol:
                yield ket, complex(amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, atol: float = NORM_ATOL) -> bool:
        return abs(self.norm() - 1.0) <= atol

    def one_photon_mass(self) -> float:
        """Probability weight carried by photon (non-vacuum) kets."""
        return float(np.sum(np.abs(self.amps[1:]) ** 2))

    def with_declaration(self, decl: BasisDecl) -> "StateVector":
        """Re-express this state over another declaration.

        Every ket carrying nonzero amplitude must exist in the target basis;
        kets only present in the target get amplitude zero.
        """
        amps = np.zeros(decl.dim, dtype=complex)
        for ket, amp in self.items(tol=0.0):
            idx = decl.index.get(ket)
            if idx is None:
                raise BasisMismatch(f"ket {ket!r} carries amplitude but is absent from target basis")
            amps[idx] = amp
        return StateVector(decl, amps)

    def __repr__(self) -> str:
        terms = ", ".join(f"{ket!r}: {amp:.4g}" for ket, amp in self.items(tol=1e-12))
        return f"StateVector({terms or '0'})"


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian positive-semidefinite operator with trace in (0, 1].

    ``labels`` names the basis the matrix is written in; for photon-space
    operators these are ``BasisKet`` objects, for register-level reductions
    they are plain strings ("0"/"1", "H"/"V", OAM values). Zero trace is
    tolerated so that degenerate assemblage members remain representable.
    """

    labels: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        n = len(self.labels)
        if mat.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {mat.shape} does not match {n} labels")
        if not np.allclose(mat, mat.conj().T, atol=ATOL):
            raise ValueError("density matrix is not Hermitian within 1e-10")
        eigs = np.linalg.eigvalsh(mat)
        if eigs.size and eigs.min() < -ATOL:
            raise ValueError(f"density matrix has negative eigenvalue {eigs.min():.3e}")
        tr = float(np.real(np.trace(mat)))
        if not -ATOL < tr <= 1.0 + ATOL:
            raise ValueError(f"trace {tr} outside (0, 1]")
        object.__setattr__(self, "matrix", _frozen(mat))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def trace_value(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def normalize(state: StateVector) -> StateVector:
    """Scale amplitudes by a positive real factor to unit norm (phase untouched)."""
    n = state.norm()
    if n <= 1e-14:
        raise ZeroState(f"cannot normalize state with norm {n:.3e}")
    return StateVector(state.decl, state.amps / n)


def inner_product(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2>, conjugate-linear in the first argument."""
    if s1.decl != s2.decl:
        raise BasisMismatch("states carry different basis declarations")
    return complex(np.vdot(s1.amps, s2.amps))


def fidelity(s: StateVector, t: StateVector) -> float:
    """|<s|t>|^2 for normalized inputs; 1 iff equal up to global phase."""
    for name, state in (("first", s), ("second", t)):
        if not state.is_normalized():
            raise ValueError(f"{name} state is not normalized (norm {state.norm():.6g})")
    return float(abs(inner_product(s, t)) ** 2)


def to_density(state: StateVector) -> DensityOperator:
    """Rank-1 projector |s><s| of a normalized state."""
    if not state.is_normalized():
        raise ValueError(f"to_density requires a normalized state (norm {state.norm():.6g})")
    return DensityOperator(state.decl.kets, np.outer(state.amps, state.amps.conj()))


def expectation_value(rho: DensityOperator, obs: np.ndarray) -> float:
    """Tr(rho · obs) for a Hermitian observable."""
    obs = np.asarray(obs, dtype=complex)
    if obs.shape != (rho.dim, rho.dim):
        raise DimensionMismatch(f"observable shape {obs.shape} vs operator dim {rho.dim}")
    if not np.allclose(obs, obs.conj().T, atol=ATOL):
        raise ValueError("observable is not Hermitian within 1e-10")
    value = complex(np.trace(rho.matrix @ obs))
    if abs(value.imag) > ATOL:
        raise ValueError(f"expectation value has imaginary residue {value.imag:.3e}")
    return float(value.real)


def apply_local_unitary(
    state: StateVector, u: np.ndarray, register: str, site: str | None = None
) -> StateVector:
    """Apply ``u`` to one register, identity everywhere else.

    ``register`` is "pol" (2x2) or "oam" (n_oam x n_oam); with ``site`` given
    the action is restricted to amplitudes at that site, otherwise it acts on
    the register across all sites. The vacuum amplitude is never touched.
    """
    decl = state.decl
    if register not in ("pol", "oam"):
        raise UnknownSubsystem(f"unknown register {register!r}")
    if site is not None:
        decl.require_site(site)
    dim = 2 if register == "pol" else len(decl.oam)
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise DimensionMismatch(f"matrix shape {u.shape}, register dimension {dim}")
    if not np.allclose(u @ u.conj().T, np.eye(dim), atol=ATOL):
        raise NonUnitary("matrix is not unitary within 1e-10")

    amps = np.array(state.amps)
    sites = [site] if site is not None else list(decl.sites)
    if register == "pol":
        for s in sites:
            for m in decl.oam:
                idx = [decl.index[BasisKet.photon(s, p, m)] for p in POLS]
                amps[idx] = u @ amps[idx]
    else:
        for s in sites:
            for p in POLS:
                idx = [decl.index[BasisKet.photon(s, p, m)] for m in decl.oam]
                amps[idx] = u @ amps[idx]
    return StateVector(decl, amps)


def _require_photon_sector(rho: DensityOperator, register: str) -> None:
    vac_mass = float(np.real(rho.matrix[0, 0]))
    if vac_mass > ATOL:
        raise UnknownSubsystem(
            f"the {register} register is undefined for states with vacuum weight {vac_mass:.3e}"
        )


def partial_trace(rho: DensityOperator, keep: str, site: str | None = None) -> DensityOperator:
    """Reduce a photon-space operator to one register.

    ``keep`` selects the kept factor:

    * ``"occupation"`` (requires ``site``): the photon-number readout of that
      site, a diagonal qubit in the {empty, occupied} basis. Coherence between
      occupancy sectors involves which-mode information and is traced away.
    * ``"pol"``: the 2x2 polarization register (one-photon states only).
    * ``"oam"``: the OAM register (one-photon states only).

    Trace is preserved exactly; the result is Hermitian PSD.
    """
    kets = rho.labels
    if not kets or not isinstance(kets[0], BasisKet):
        raise UnknownSubsystem("partial_trace needs an operator over photon-basis kets")

    if keep == "occupation":
        if site is None:
            raise UnknownSubsystem("occupation selector needs a site")
        sites = {k.site for k in kets if not k.is_vacuum}
        if site not in sites:
            raise UnknownSite(f"site {site!r} not present in operator basis")
        out = np.zeros((2, 2), dtype=complex)
        for i, ket in enumerate(kets):
            n = 0 if ket.is_vacuum or ket.site != site else 1
            out[n, n] += rho.matrix[i, i]
        return DensityOperator(("0", "1"), out)

    if keep == "pol":
        _require_photon_sector(rho, "polarization")
        out = np.zeros((2, 2), dtype=complex)
        pol_idx = {"H": 0, "V": 1}
        for i, k1 in enumerate(kets):
            if k1.is_vacuum:
                continue
            for j, k2 in enumerate(kets):
                if k2.is_vacuum:
                    continue
                if k1.site == k2.site and k1.oam == k2.oam:
                    out[pol_idx[k1.pol], pol_idx[k2.pol]] += rho.matrix[i, j]
        return DensityOperator(POLS, out)

    if keep == "oam":
        _require_photon_sector(rho, "OAM")
        values = sorted({k.oam for k in kets if not k.is_vacuum})
        oam_idx = {m: i for i, m in enumerate(values)}
        out = np.zeros((len(values), len(values)), dtype=complex)
        for i, k1 in enumerate(kets):
            if k1.is_vacuum:
                continue
            for j, k2 in enumerate(kets):
                if k2.is_vacuum:
                    continue
                if k1.site == k2.site and k1.pol == k2.pol:
                    out[oam_idx[k1.oam], oam_idx[k2.oam]] += rho.matrix[i, j]
        return DensityOperator(tuple(values), out)

    raise UnknownSubsystem(f"unknown selector {keep!r}")
