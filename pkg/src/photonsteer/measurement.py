"""Projective measurements, Born probabilities, conditional collapse, sampling.

Model. A polarization (or OAM) measurement projects that register across the
one-photon sector; the analyzer is nondestructive, so the photon keeps its
path. The detector sits at one site, which only affects how outcomes are
*reported*: a register outcome whose conditional state carries no amplitude
at the detector site produces no click, so its probability weight is folded
into the "no-click" record together with the vacuum. The fold is a
coarse-grained Lueders update (one combined projector), so superpositions of
the invisible branches survive collapse. This is what makes "detect nothing"
a first-class outcome: finding the box empty still collapses the state.

Occupation measurements are the destructive presence test at a site: click
means the photon is there, no-click aggregates photon-elsewhere and vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import POLS, BasisKet, DensityOperator, StateVector, normalize, partial_trace, to_density
from .errors import BasisMismatch, ZeroProbabilityOutcome

PROB_FLOOR = 1e-14

NO_CLICK = "no-click"

# Register-level analyzer bases. Circular convention matches the q-plate:
# |L> = (|H> - i|V>)/sqrt(2), |R> = (|H> + i|V>)/sqrt(2).
_POL_BASES: dict[str, tuple[tuple[str, np.ndarray], ...]] = {
    "ZHV": (
        ("H-click", np.array([1.0, 0.0], dtype=complex)),
        ("V-click", np.array([0.0, 1.0], dtype=complex)),
    ),
    "Xdiag": (
        ("+", np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)),
        ("-", np.array([-1.0, 1.0], dtype=complex) / np.sqrt(2.0)),
    ),
    "Ycirc": (
        ("L", np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0)),
        ("R", np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)),
    ),
}


@dataclass(frozen=True)
class MeasurementSetting:
    """A detector site plus an orthonormal, labelled register basis.

    ``register`` is "pol", "oam" or "occupation". ``outcomes`` holds
    (label, register-level basis vector) pairs; occupation settings encode
    presence directly and carry no vectors. ``include_no_click`` is always
    true: the projectors plus the no-click complement resolve the identity.
    """

    site: str
    register: str
    basis_name: str
    outcomes: tuple[tuple[str, np.ndarray], ...]
    include_no_click: bool = True

    @property
    def labels(self) -> tuple[str, ...]:
        ordered = tuple(label for label, _ in self.outcomes)
        return ordered + (NO_CLICK,) if self.include_no_click else ordered


@dataclass(frozen=True)
class OutcomeRecord:
    """One outcome: label, Born probability, normalized conditional state.

    ``conditional_state`` is ``None`` when the probability is below the
    representability floor (1e-14).
    """

    label: str
    probability: float
    conditional_state: StateVector | None


def polarization_setting(site: str, basis: str) -> MeasurementSetting:
    """Polarization analyzer at ``site``; basis one of ZHV, Xdiag, Ycirc."""
    if basis not in _POL_BASES:
        raise ValueError(f"basis must be one of {tuple(_POL_BASES)}, got {basis!r}")
    return MeasurementSetting(site, "pol", basis, _POL_BASES[basis])


def oam_setting(site: str, basis: str, oam_values: tuple[int, ...]) -> MeasurementSetting:
    """OAM analyzer. ``number`` projects each value; ``pm`` uses (|+2>±|-2>)/sqrt(2)."""
    if basis == "number":
        outcomes = tuple(
            (str(m), np.eye(len(oam_values), dtype=complex)[i])
            for i, m in enumerate(oam_values)
        )
    elif basis == "pm":
        if 2 not in oam_values or -2 not in oam_values:
            raise ValueError(f"pm basis needs OAM values +2 and -2, have {oam_values}")
        plus = np.zeros(len(oam_values), dtype=complex)
        minus = np.zeros(len(oam_values), dtype=complex)
        plus[oam_values.index(2)] = plus[oam_values.index(-2)] = 1.0 / np.sqrt(2.0)
        minus[oam_values.index(2)] = 1.0 / np.sqrt(2.0)
        minus[oam_values.index(-2)] = -1.0 / np.sqrt(2.0)
        outcomes = [("+", plus), ("-", minus)]
        for i, m in enumerate(oam_values):
            if m not in (2, -2):
                vec = np.zeros(len(oam_values), dtype=complex)
                vec[i] = 1.0
                outcomes.append((str(m), vec))
        outcomes = tuple(outcomes)
    else:
        raise ValueError(f"basis must be 'number' or 'pm', got {basis!r}")
    return MeasurementSetting(site, "oam", basis, outcomes)


def occupation_setting(site: str) -> MeasurementSetting:
    """Presence detector at ``site``: click iff the photon is found there."""
    return MeasurementSetting(site, "occupation", "occupation", (("click", np.array([1.0])),))


def _project(state: StateVector, setting: MeasurementSetting, vec: np.ndarray) -> np.ndarray:
    """Apply the register projector |vec><vec| across the one-photon sector."""
    decl = state.decl
    if setting.register == "pol":
        blocks = [
            [decl.index[BasisKet.photon(s, p, m)] for p in POLS]
            for s in decl.sites
            for m in decl.oam
        ]
    else:
        blocks = [
            [decl.index[BasisKet.photon(s, p, m)] for m in decl.oam]
            for s in decl.sites
            for p in POLS
        ]
    if blocks and len(vec) != len(blocks[0]):
        raise BasisMismatch(
            f"{setting.register} projector has dimension {len(vec)}, "
            f"register has {len(blocks[0])}"
        )
    out = np.zeros(decl.dim, dtype=complex)
    for idx in blocks:
        out[idx] = vec * np.vdot(vec, state.amps[idx])
    return out


def _site_mass(amps: np.ndarray, decl, site: str) -> float:
    total = 0.0
    for i, ket in enumerate(decl.kets):
        if not ket.is_vacuum and ket.site == site:
            total += abs(amps[i]) ** 2
    return total


def born_probabilities(state: StateVector, setting: MeasurementSetting) -> list[OutcomeRecord]:
    """Outcome records for ``setting`` on ``state``; probabilities sum to 1."""
    decl = state.decl
    decl.require_site(setting.site)
    if not state.is_normalized():
        raise ValueError(f"measurement requires a normalized state (norm {state.norm():.6g})")

    if setting.register == "occupation":
        click = np.array(state.amps)
        for i, ket in enumerate(decl.kets):
            if ket.is_vacuum or ket.site != setting.site:
                click[i] = 0.0
        rest = state.amps - click
        records = []
        for label, amps in (("click", click), (NO_CLICK, rest)):
            p = float(np.sum(np.abs(amps) ** 2))
            cond = normalize(StateVector(decl, amps)) if p >= PROB_FLOOR else None
            records.append(OutcomeRecord(label, p if p >= PROB_FLOOR else 0.0, cond))
        return records

    projected: dict[str, np.ndarray] = {
        label: _project(state, setting, vec) for label, vec in setting.outcomes
    }
    # Vacuum never reaches the analyzer.
    vacuum = np.zeros(decl.dim, dtype=complex)
    vacuum[0] = state.amps[0]

    dark = vacuum
    records: list[OutcomeRecord] = []
    for label, _ in setting.outcomes:
        amps = projected[label]
        p = float(np.sum(np.abs(amps) ** 2))
        if p >= PROB_FLOOR and _site_mass(amps, decl, setting.site) < PROB_FLOOR * p:
            # Invisible to the detector at this site: merge into no-click
            # coherently (the apparatus cannot distinguish these branches).
            dark = dark + amps
            records.append(OutcomeRecord(label, 0.0, None))
            continue
        cond = normalize(StateVector(decl, amps)) if p >= PROB_FLOOR else None
        records.append(OutcomeRecord(label, p if p >= PROB_FLOOR else 0.0, cond))

    p_dark = float(np.sum(np.abs(dark) ** 2))
    cond = normalize(StateVector(decl, dark)) if p_dark >= PROB_FLOOR else None
    records.append(OutcomeRecord(NO_CLICK, p_dark if p_dark >= PROB_FLOOR else 0.0, cond))
    return records


def collapse(state: StateVector, setting: MeasurementSetting, outcome_label: str) -> StateVector:
    """Normalized post-measurement state for one outcome."""
    for record in born_probabilities(state, setting):
        if record.label == outcome_label:
            if record.probability < PROB_FLOOR or record.conditional_state is None:
                raise ZeroProbabilityOutcome(
                    f"outcome {outcome_label!r} has probability {record.probability:.3e}"
                )
            return record.conditional_state
    raise ValueError(f"setting has no outcome {outcome_label!r} (labels: {setting.labels})")


def sample_outcome(state: StateVector, setting: MeasurementSetting, seed: int) -> OutcomeRecord:
    """Draw one outcome with a seed-reproducible generator (inverse CDF)."""
    return _sample(born_probabilities(state, setting), np.random.default_rng(seed).random())


def sample_outcomes(
    state: StateVector, setting: MeasurementSetting, n: int, seed: int
) -> list[str]:
    """Draw ``n`` outcome labels; identical seeds give identical sequences."""
    records = born_probabilities(state, setting)
    rng = np.random.default_rng(seed)
    return [_sample(records, u).label for u in rng.random(n)]


def _sample(records: list[OutcomeRecord], u: float) -> OutcomeRecord:
    acc = 0.0
    for record in records:
        acc += record.probability
        if u < acc:
            return record
    return records[-1]  # u landed in the rounding gap below 1


def reduced_state(state: StateVector, keep: str, site: str | None = None) -> DensityOperator:
    """Partial trace of |state><state| keeping one register."""
    return partial_trace(to_density(state), keep, site)
