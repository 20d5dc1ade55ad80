"""Nonlocality quantifiers: assemblages, CJWR steering value, CHSH, LHS search.

Two-qubit frame. The analysis treats the prepared photon as an effective
two-qubit system. For internal-external entanglement Alice's qubit is the
polarization register (H -> 0, V -> 1) and Bob's qubit is the occupation of
his site as a coherent dual-rail mode (0 = empty, 1 = photon present); for
path-only states both qubits are site occupations. In that frame the
benchmark entangled state has +1 correlators along every axis with the
dichotomic observable table below, whose occupation-Z assigns +1 to "photon
present".

The LHS search is an inner approximation: local-hidden-state models are
restricted to mixtures of pure states on a deterministic Fibonacci grid of
the Bloch sphere. A feasible program certifies the assemblage unsteerable
(the certificate reconstructs it to the reported residual); an infeasible
one is evidence at that resolution only and should be paired with a CJWR
violation for a steering certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import ATOL, BasisKet, DensityOperator, StateVector
from .errors import (
    BasisMismatch,
    GridTooCoarse,
    NonDichotomicObservable,
    NonQubitBobMarginal,
    TooManySettings,
    UnknownSite,
)
from .simplex import solve_feasibility

TSIRELSON = 2.0 * np.sqrt(2.0)

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Dichotomic observable tables. Polarization: H -> +1. Occupation qubit
# (basis order: empty, occupied): photon present -> +1, which is -Z in the
# raw basis ordering; X and Y are the single-photon coherences.
ALICE_OBSERVABLES = {"Z": _PAULI["Z"], "X": _PAULI["X"], "Y": _PAULI["Y"]}
BOB_OBSERVABLES = {"Z": -_PAULI["Z"], "X": _PAULI["X"], "Y": _PAULI["Y"]}

# Projective outcomes (label -> rank-1 projector) of each Alice setting,
# outcome +1 first. Derived from ALICE_OBSERVABLES eigenvectors.
_KET_X_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_KET_X_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
_KET_Y_PLUS = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)
_KET_Y_MINUS = np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0)

ALICE_PROJECTORS = {
    "Z": ((+1, np.diag([1.0, 0.0]).astype(complex)), (-1, np.diag([0.0, 1.0]).astype(complex))),
    "X": (
        (+1, np.outer(_KET_X_PLUS, _KET_X_PLUS.conj())),
        (-1, np.outer(_KET_X_MINUS, _KET_X_MINUS.conj())),
    ),
    "Y": (
        (+1, np.outer(_KET_Y_PLUS, _KET_Y_PLUS.conj())),
        (-1, np.outer(_KET_Y_MINUS, _KET_Y_MINUS.conj())),
    ),
}

QUBIT_PAIR_LABELS = ("A0|B0", "A0|B1", "A1|B0", "A1|B1")


@dataclass(frozen=True)
class Assemblage:
    """Subnormalized conditional states at Bob, indexed by (setting, outcome).

    Outcomes are the eigenvalues +1/-1 of Alice's dichotomic setting. Members
    are 2x2 matrices in Bob's occupation basis. ``sum_a member(x, a)`` is
    Alice-setting independent (no signaling); the residual records how well
    that holds numerically.
    """

    settings: tuple[str, ...]
    members: dict[tuple[str, int], np.ndarray]

    def __post_init__(self):
        frozen = {}
        for key, mat in self.members.items():
            arr = np.asarray(mat, dtype=complex)
            if arr.shape != (2, 2):
                raise NonQubitBobMarginal(f"member {key} has shape {arr.shape}")
            if not np.allclose(arr, arr.conj().T, atol=ATOL):
                raise ValueError(f"member {key} is not Hermitian")
            if np.linalg.eigvalsh(arr).min() < -ATOL:
                raise ValueError(f"member {key} is not PSD")
            arr.setflags(write=False)
            frozen[key] = arr
        object.__setattr__(self, "members", frozen)
        object.__setattr__(self, "settings", tuple(self.settings))

    def bob_marginal(self, setting: str) -> np.ndarray:
        return sum(self.members[(setting, a)] for a in (+1, -1))

    def no_signaling_residual(self) -> float:
        marginals = [self.bob_marginal(x) for x in self.settings]
        worst = 0.0
        for other in marginals[1:]:
            worst = max(worst, float(np.max(np.abs(other - marginals[0]))))
        return worst


@dataclass(frozen=True)
class SteeringVerdict:
    """LHS linear-program outcome at one grid resolution.

    ``certificate`` (feasible case) lists (strategy, bloch_vector, weight)
    triples; a strategy assigns an outcome to each setting in order.
    """

    status: str  # UnsteerableCertified | NoLHSFoundAtResolution
    grid_n: int
    residual: float
    certificate: tuple[tuple[tuple[int, ...], tuple[float, float, float], float], ...] | None


@dataclass(frozen=True)
class ChshResult:
    """CHSH functional value with its four observable angles (degrees).

    ``correlators`` holds E(a0,b0), E(a0,b1), E(a1,b0), E(a1,b1); the value
    is E(a0,b0) - E(a0,b1) + E(a1,b0) + E(a1,b1), the sign combination under
    which the angle set (0, 90, 45, 135) is optimal for the benchmark state.
    """

    value: float
    angles: tuple[float, float, float, float]
    correlators: tuple[float, float, float, float]

    def __post_init__(self):
        if abs(self.value) > TSIRELSON + 1e-9:
            raise ValueError(f"CHSH value {self.value} exceeds the Tsirelson bound")
        for e in self.correlators:
            if abs(e) > 1.0 + ATOL:
                raise ValueError(f"correlator {e} outside [-1, 1]")


def pol_path_qubits(state: StateVector, bob_site: str) -> DensityOperator:
    """Two-qubit density matrix (polarization ⊗ Bob-site occupation).

    Requires a pure one-photon state over exactly two spatial modes; OAM is
    traced out. Basis order: (H,0), (H,1), (V,0), (V,1) with occupation 1
    meaning the photon is at ``bob_site``.
    """
    decl = state.decl
    if bob_site not in decl.sites:
        raise UnknownSite(f"site {bob_site!r} not declared")
    if abs(state.amps[0]) ** 2 > ATOL:
        raise NonQubitBobMarginal("state has vacuum weight; polarization-path frame undefined")

    support = {ket.site for ket, _ in state.items(tol=1e-12) if not ket.is_vacuum}
    others = [s for s in decl.sites if s != bob_site]
    if len(decl.sites) == 2:
        alice_site = others[0]
    else:
        candidates = support - {bob_site}
        if len(candidates) != 1:
            raise NonQubitBobMarginal(
                f"need exactly one occupied site besides {bob_site!r}, support is {support}"
            )
        alice_site = candidates.pop()
    if not support <= {bob_site, alice_site}:
        raise NonQubitBobMarginal(f"support {support} spills outside the two chosen sites")

    site_of = {0: alice_site, 1: bob_site}
    rho = np.zeros((4, 4), dtype=complex)
    for p1, pol1 in enumerate("HV"):
        for n1 in (0, 1):
            for p2, pol2 in enumerate("HV"):
                for n2 in (0, 1):
                    acc = 0.0 + 0.0j
                    for m in decl.oam:
                        a1 = state.amplitude(BasisKet.photon(site_of[n1], pol1, m))
                        a2 = state.amplitude(BasisKet.photon(site_of[n2], pol2, m))
                        acc += a1 * np.conj(a2)
                    rho[p1 * 2 + n1, p2 * 2 + n2] = acc
    return DensityOperator(QUBIT_PAIR_LABELS, rho)


def occupation_qubits(state: StateVector, alice_site: str, bob_site: str) -> DensityOperator:
    """Two-qubit density matrix (Alice-site occupation ⊗ Bob-site occupation).

    The dual-rail reading for path-only states: the internal (pol, OAM)
    factor must be constant across all one-photon amplitudes so occupation
    coherences, including vacuum-photon ones, are carried faithfully.
    """
    decl = state.decl
    for s in (alice_site, bob_site):
        if s not in decl.sites:
            raise UnknownSite(f"site {s!r} not declared")
    if alice_site == bob_site:
        raise NonQubitBobMarginal("Alice and Bob need distinct sites")

    internal = [(p, m) for p in "HV" for m in decl.oam]
    matrix = np.zeros((len(decl.sites), len(internal)), dtype=complex)
    for i, s in enumerate(decl.sites):
        for j, (p, m) in enumerate(internal):
            matrix[i, j] = state.amplitude(BasisKet.photon(s, p, m))
        if s not in (alice_site, bob_site) and np.linalg.norm(matrix[i]) > 1e-10:
            raise NonQubitBobMarginal(f"photon amplitude at third site {s!r}")

    amp2q = np.zeros(4, dtype=complex)  # |n_A n_B>: 00, 01, 10, 11
    amp2q[0] = state.amps[0]
    photon_norm = np.linalg.norm(matrix)
    if photon_norm > 1e-12:
        u, sing, vh = np.linalg.svd(matrix)
        if sing.size > 1 and sing[1] > ATOL:
            raise NonQubitBobMarginal(
                "internal polarization/OAM factor is entangled with the path"
            )
        occ = u[:, 0] * sing[0]
        phase = vh[0, np.argmax(np.abs(vh[0]))]
        occ = occ * (phase / abs(phase))  # fold the internal factor's phase into the path
        site_index = {s: i for i, s in enumerate(decl.sites)}
        amp2q[2] = occ[site_index[alice_site]]  # |10>
        amp2q[1] = occ[site_index[bob_site]]  # |01>
    return DensityOperator(QUBIT_PAIR_LABELS, np.outer(amp2q, amp2q.conj()))


def _as_two_qubit_matrix(state: StateVector | DensityOperator, bob_site: str | None) -> np.ndarray:
    if isinstance(state, DensityOperator):
        if state.dim != 4:
            raise NonQubitBobMarginal(f"density operator has dimension {state.dim}, need 4")
        return np.asarray(state.matrix)
    if bob_site is None:
        raise NonQubitBobMarginal("a StateVector input needs bob_site to fix the frame")
    return np.asarray(pol_path_qubits(state, bob_site).matrix)


def _check_dichotomic(obs: np.ndarray) -> np.ndarray:
    obs = np.asarray(obs, dtype=complex)
    if obs.shape != (2, 2):
        raise NonDichotomicObservable(f"observable has shape {obs.shape}")
    if not np.allclose(obs, obs.conj().T, atol=ATOL):
        raise NonDichotomicObservable("observable is not Hermitian")
    eigs = np.sort(np.linalg.eigvalsh(obs))
    if not np.allclose(eigs, [-1.0, 1.0], atol=ATOL):
        raise NonDichotomicObservable(f"eigenvalues {eigs} are not (-1, +1)")
    return obs


def _resolve_pair(pair) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(pair, str):
        if pair not in ALICE_OBSERVABLES:
            raise NonDichotomicObservable(f"unknown axis {pair!r}, use Z, X or Y")
        return ALICE_OBSERVABLES[pair], BOB_OBSERVABLES[pair]
    a, b = pair
    return _check_dichotomic(a), _check_dichotomic(b)


def correlator(rho2q: np.ndarray, alice_obs: np.ndarray, bob_obs: np.ndarray) -> float:
    value = complex(np.trace(rho2q @ np.kron(alice_obs, bob_obs)))
    return float(value.real)


def cjwr_value(
    state: StateVector | DensityOperator,
    pairs,
    n: int | None = None,
    bob_site: str | None = None,
) -> float:
    """Linear steering functional F_n = |sum_k <A_k ⊗ B_k>| / sqrt(n).

    LHS-describable correlations obey F_n <= 1. Pairs are axis names ("Z",
    "X", "Y", resolved through the module observable tables) or explicit
    (alice, bob) matrix pairs; n must be 2 or 3.
    """
    pairs = list(pairs)
    if n is None:
        n = len(pairs)
    if n != len(pairs):
        raise ValueError(f"n={n} but {len(pairs)} pairs given")
    if n not in (2, 3):
        raise ValueError(f"CJWR is implemented for n in {{2, 3}}, got {n}")
    rho = _as_two_qubit_matrix(state, bob_site)
    total = sum(correlator(rho, *_resolve_pair(pair)) for pair in pairs)
    return float(abs(total) / np.sqrt(n))


def _correlation_matrix(rho2q: np.ndarray) -> np.ndarray:
    """T[i, j] = <A_i ⊗ B_j> for the (Z, X) observable plane."""
    axes = ("Z", "X")
    return np.array(
        [
            [correlator(rho2q, ALICE_OBSERVABLES[i], BOB_OBSERVABLES[j]) for j in axes]
            for i in axes
        ]
    )


def chsh_value(
    state: StateVector | DensityOperator,
    a0: float,
    a1: float,
    b0: float,
    b1: float,
    bob_site: str | None = None,
) -> ChshResult:
    """CHSH functional at four observable angles (degrees) in the Z-X plane."""
    rho = _as_two_qubit_matrix(state, bob_site)
    T = _correlation_matrix(rho)

    def E(a: float, b: float) -> float:
        ta, tb = np.deg2rad(a), np.deg2rad(b)
        ua = np.array([np.cos(ta), np.sin(ta)])
        ub = np.array([np.cos(tb), np.sin(tb)])
        return float(ua @ T @ ub)

    e00, e01, e10, e11 = E(a0, b0), E(a0, b1), E(a1, b0), E(a1, b1)
    s = e00 - e01 + e10 + e11
    return ChshResult(s, (a0, a1, b0, b1), (e00, e01, e10, e11))


def chsh_optimize(
    state: StateVector | DensityOperator,
    grid_step_deg: float,
    bob_site: str | None = None,
) -> ChshResult:
    """Maximize the CHSH functional over a uniform four-angle grid.

    Serves as the brute-force oracle for ``chsh_value``: no analytic shortcut
    beyond evaluating every grid point.
    """
    if grid_step_deg <= 0 or abs(360.0 / grid_step_deg - round(360.0 / grid_step_deg)) > 1e-9:
        raise ValueError(f"grid step {grid_step_deg} does not divide 360")
    rho = _as_two_qubit_matrix(state, bob_site)
    T = _correlation_matrix(rho)

    angles = np.arange(0.0, 360.0, grid_step_deg)
    radians = np.deg2rad(angles)
    u = np.stack([np.cos(radians), np.sin(radians)])  # 2 x k
    E = u.T @ T @ u  # E[i, j] = E(angle_i, angle_j)

    # S = E(a0,b0) - E(a0,b1) + E(a1,b0) + E(a1,b1); maximize the a0 and a1
    # contributions independently per (b0, b1) pair.
    d0 = E[:, :, None] - E[:, None, :]  # a0 term over (a0, b0, b1)
    d1 = E[:, :, None] + E[:, None, :]  # a1 term over (a1, b0, b1)
    best0 = d0.max(axis=0)
    best0_idx = d0.argmax(axis=0)
    best1 = d1.max(axis=0)
    best1_idx = d1.argmax(axis=0)
    total = best0 + best1
    flat = int(np.argmax(total))
    i_b0, i_b1 = np.unravel_index(flat, total.shape)
    a0 = float(angles[best0_idx[i_b0, i_b1]])
    a1 = float(angles[best1_idx[i_b0, i_b1]])
    return chsh_value(state, a0, a1, float(angles[i_b0]), float(angles[i_b1]), bob_site=bob_site)


def compute_assemblage(
    state: StateVector | DensityOperator,
    alice_settings,
    bob_site: str | None = None,
) -> Assemblage:
    """Conditional Bob states sigma(a|x) = Tr_A[(Pi_a^x ⊗ I) rho].

    Each member carries trace p(a|x); summing members over outcomes gives
    Bob's unconditional marginal for every setting (no signaling).
    """
    settings = tuple(alice_settings)
    if not settings:
        raise ValueError("at least one Alice setting required")
    rho = _as_two_qubit_matrix(state, bob_site)
    members: dict[tuple[str, int], np.ndarray] = {}
    for x in settings:
        if x not in ALICE_PROJECTORS:
            raise NonDichotomicObservable(f"unknown setting {x!r}, use Z, X or Y")
        for outcome, projector in ALICE_PROJECTORS[x]:
            big = np.kron(projector, np.eye(2, dtype=complex)) @ rho
            member = big.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
            members[(x, outcome)] = member
    return Assemblage(settings, members)


def fibonacci_bloch_grid(count: int) -> np.ndarray:
    """``count`` near-uniform unit vectors on the Bloch sphere (deterministic)."""
    indices = np.arange(count, dtype=float) + 0.5
    z = 1.0 - 2.0 * indices / count
    radius = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * indices
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])


def _bloch_state(n: np.ndarray) -> np.ndarray:
    return 0.5 * (
        _PAULI["I"] + n[0] * _PAULI["X"] + n[1] * _PAULI["Y"] + n[2] * _PAULI["Z"]
    )


def _real_components(mat: np.ndarray) -> np.ndarray:
    return np.array([mat[0, 0].real, mat[1, 1].real, mat[0, 1].real, mat[0, 1].imag])


def lhs_feasibility(assemblage: Assemblage, grid_n: int) -> SteeringVerdict:
    """Search for a local-hidden-state model on a Bloch grid of grid_n² states.

    Feasible: the assemblage is certified unsteerable and the certificate
    reconstructs it within the reported residual. Infeasible: no model exists
    *at this resolution*; pair with a CJWR violation before claiming steering.
    """
    if grid_n < 6:
        raise GridTooCoarse(f"grid_n must be at least 6, got {grid_n}")
    m = len(assemblage.settings)
    if m > 4:
        raise TooManySettings(f"at most 4 settings supported, got {m}")
    outcomes = (+1, -1)
    for key in product(assemblage.settings, outcomes):
        if key not in assemblage.members:
            raise BasisMismatch(f"assemblage missing member {key}")

    grid = fibonacci_bloch_grid(grid_n * grid_n)
    grid_states = [_bloch_state(n) for n in grid]
    strategies = list(product(outcomes, repeat=m))

    columns = []
    for strategy in strategies:
        responds = [1.0 if strategy[ix] == a else 0.0 for ix in range(m) for a in outcomes]
        for g in grid_states:
            comp = _real_components(g)
            columns.append(np.concatenate([r * comp for r in responds]))
    A = np.array(columns).T  # 4*m*2 rows, one column per (strategy, grid state)

    b = np.concatenate(
        [
            _real_components(assemblage.members[(x, a)])
            for x in assemblage.settings
            for a in outcomes
        ]
    )

    result = solve_feasibility(A, b)
    if result.feasible and result.residual < 1e-7:
        certificate = []
        for idx in np.nonzero(result.x > 1e-12)[0]:
            s_idx, g_idx = divmod(int(idx), len(grid_states))
            certificate.append(
                (strategies[s_idx], tuple(float(v) for v in grid[g_idx]), float(result.x[idx]))
            )
        return SteeringVerdict(
            "UnsteerableCertified", grid_n, result.residual, tuple(certificate)
        )
    residual = result.residual if result.feasible else result.objective
    return SteeringVerdict("NoLHSFoundAtResolution", grid_n, float(residual), None)


def replay_certificate(verdict: SteeringVerdict, assemblage: Assemblage) -> float:
    """Rebuild sigma(a|x) from an LHS certificate; returns the worst deviation."""
    if verdict.certificate is None:
        raise ValueError("verdict carries no certificate")
    worst = 0.0
    for ix, x in enumerate(assemblage.settings):
        for a in (+1, -1):
            total = np.zeros((2, 2), dtype=complex)
            for strategy, bloch, weight in verdict.certificate:
                if strategy[ix] == a:
                    total += weight * _bloch_state(np.asarray(bloch))
            worst = max(worst, float(np.max(np.abs(total - assemblage.members[(x, a)]))))
    return worst
