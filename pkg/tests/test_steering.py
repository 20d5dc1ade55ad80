"""Steering and Bell machinery: frames, assemblages, CJWR, CHSH, LHS search."""

import numpy as np
import pytest

from photonsteer.core import BasisDecl, BasisKet, DensityOperator, StateVector
from photonsteer.errors import (
    GridTooCoarse,
    NonDichotomicObservable,
    NonQubitBobMarginal,
    TooManySettings,
)
from photonsteer.scenarios import eq1_state, hardy_state, noisy_state, twc_state
from photonsteer.steering import (
    QUBIT_PAIR_LABELS,
    Assemblage,
    chsh_optimize,
    chsh_value,
    cjwr_value,
    compute_assemblage,
    fibonacci_bloch_grid,
    lhs_feasibility,
    occupation_qubits,
    pol_path_qubits,
    replay_certificate,
)

SQ2 = 1.0 / np.sqrt(2.0)
DECL = BasisDecl(("NY", "PUE"))

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
IDENTITY = np.eye(2)


def product_state_ny_v() -> StateVector:
    return StateVector.from_amplitudes(DECL, {BasisKet.photon("NY", "V"): 1.0})


def random_two_qubit_density(rng, mixed: bool = False) -> DensityOperator:
    if mixed:
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
    else:
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
    return DensityOperator(QUBIT_PAIR_LABELS, rho)


class TestTwoQubitFrames:
    def test_entangled_preset_is_triplet_in_pol_occupation(self):
        rho = pol_path_qubits(eq1_state(), "PUE")
        psi = np.zeros(4, dtype=complex)  # (H,0),(H,1),(V,0),(V,1)
        psi[1] = psi[2] = SQ2
        np.testing.assert_allclose(rho.matrix, np.outer(psi, psi.conj()), atol=1e-12)

    def test_vacuum_weight_rejected(self):
        with pytest.raises(NonQubitBobMarginal):
            pol_path_qubits(hardy_state(), "u2")

    def test_dual_rail_frame_for_path_state(self):
        rho = occupation_qubits(twc_state(), "b1", "b2")
        psi = np.zeros(4, dtype=complex)  # |n_A n_B>: 00, 01, 10, 11
        psi[2] = SQ2  # photon at b1
        psi[1] = 1j * SQ2  # photon at b2
        np.testing.assert_allclose(rho.matrix, np.outer(psi, psi.conj()), atol=1e-12)

    def test_dual_rail_frame_keeps_vacuum_coherence(self):
        rho = occupation_qubits(hardy_state(0.6, 0.8), "u1", "u2")
        psi = np.zeros(4, dtype=complex)
        psi[0] = 0.6
        psi[2] = 0.8j / np.sqrt(2)
        psi[1] = 0.8 / np.sqrt(2)
        np.testing.assert_allclose(rho.matrix, np.outer(psi, psi.conj()), atol=1e-12)

    def test_internal_entanglement_rejected_in_dual_rail_frame(self):
        s = StateVector.from_amplitudes(
            DECL,
            {BasisKet.photon("NY", "H"): SQ2, BasisKet.photon("PUE", "V"): SQ2},
        )
        with pytest.raises(NonQubitBobMarginal):
            occupation_qubits(s, "NY", "PUE")


class TestAssemblage:
    def test_entangled_preset_members(self):
        # Oracle: explicit 4-dim algebra. Alice Z keeps one branch each; the
        # X outcomes leave Bob's dual-rail qubit in (|0> ± |1>)/sqrt(2).
        asm = compute_assemblage(eq1_state(), ("Z", "X"), bob_site="PUE")
        np.testing.assert_allclose(
            asm.members[("Z", -1)], [[0.5, 0.0], [0.0, 0.0]], atol=1e-12
        )
        np.testing.assert_allclose(
            asm.members[("Z", +1)], [[0.0, 0.0], [0.0, 0.5]], atol=1e-12
        )
        for a in (+1, -1):
            np.testing.assert_allclose(
                asm.members[("X", a)], 0.25 * (IDENTITY + a * PAULI_X), atol=1e-12
            )

    def test_product_state_members_all_point_the_same_way(self):
        asm = compute_assemblage(product_state_ny_v(), ("Z", "X"), bob_site="PUE")
        empty = np.array([[1.0, 0.0], [0.0, 0.0]])
        for (x, a), member in asm.members.items():
            p = float(np.real(np.trace(member)))
            if p > 1e-12:
                np.testing.assert_allclose(member / p, empty, atol=1e-12)

    def test_no_signaling_for_random_inputs(self, rng):
        for mixed in (False, True):
            for _ in range(10):
                rho = random_two_qubit_density(rng, mixed)
                asm = compute_assemblage(rho, ("Z", "X", "Y"))
                assert asm.no_signaling_residual() < 1e-10

    def test_member_traces_are_outcome_probabilities(self, rng):
        for _ in range(10):
            rho = random_two_qubit_density(rng)
            asm = compute_assemblage(rho, ("Z", "X"))
            for x in ("Z", "X"):
                total = sum(np.trace(asm.members[(x, a)]).real for a in (1, -1))
                assert total == pytest.approx(1.0, abs=1e-10)


class TestCjwr:
    def test_entangled_preset_violates(self):
        assert cjwr_value(eq1_state(), ("Z", "X"), bob_site="PUE") == pytest.approx(
            np.sqrt(2.0), abs=1e-9
        )

    def test_three_axes(self):
        assert cjwr_value(eq1_state(), ("Z", "X", "Y"), bob_site="PUE") == pytest.approx(
            np.sqrt(3.0), abs=1e-9
        )

    def test_product_state_stays_local(self):
        value = cjwr_value(product_state_ny_v(), ("Z", "X"), bob_site="PUE")
        assert value == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-9)

    def test_visibility_scales_linearly(self):
        for v in np.arange(0.1, 1.05, 0.1):
            value = cjwr_value(noisy_state(float(v)), ("Z", "X"))
            assert value == pytest.approx(float(v) * np.sqrt(2.0), abs=1e-9)

    def test_zero_pairs_rejected(self):
        with pytest.raises(ValueError):
            cjwr_value(eq1_state(), (), bob_site="PUE")

    def test_identity_like_observable_rejected(self):
        with pytest.raises(NonDichotomicObservable):
            cjwr_value(noisy_state(1.0), [(IDENTITY, IDENTITY), (PAULI_X, PAULI_X)])

    def test_pair_count_must_match_n(self):
        with pytest.raises(ValueError):
            cjwr_value(noisy_state(1.0), ("Z", "X"), n=3)


class TestChsh:
    def test_standard_angles_reach_tsirelson(self):
        result = chsh_value(eq1_state(), 0.0, 90.0, 45.0, 135.0, bob_site="PUE")
        assert result.value == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-9)

    def test_correlators_within_unit_interval(self):
        result = chsh_value(eq1_state(), 0.0, 90.0, 45.0, 135.0, bob_site="PUE")
        assert all(abs(e) <= 1.0 + 1e-10 for e in result.correlators)

    def test_half_visibility_halves_the_value(self):
        result = chsh_value(noisy_state(0.5), 0.0, 90.0, 45.0, 135.0)
        assert result.value == pytest.approx(np.sqrt(2.0), abs=1e-9)

    def test_product_state_bounded_by_two(self, rng):
        for _ in range(25):
            angles = rng.uniform(0.0, 360.0, size=4)
            result = chsh_value(product_state_ny_v(), *angles, bob_site="PUE")
            assert abs(result.value) <= 2.0 + 1e-9


class TestChshOptimize:
    def test_fine_grid_approaches_tsirelson(self):
        result = chsh_optimize(eq1_state(), 5.0, bob_site="PUE")
        assert result.value >= 2.81

    def test_product_state_never_beats_local_bound(self):
        result = chsh_optimize(product_state_ny_v(), 5.0, bob_site="PUE")
        assert result.value <= 2.0 + 1e-9

    def test_coarse_axis_grid_tops_out_at_two(self):
        result = chsh_optimize(eq1_state(), 90.0, bob_site="PUE")
        assert result.value == pytest.approx(2.0, abs=1e-9)

    def test_optimum_angles_reproduce_reported_value(self):
        best = chsh_optimize(noisy_state(0.85), 15.0)
        redo = chsh_value(noisy_state(0.85), *best.angles)
        assert redo.value == pytest.approx(best.value, abs=1e-12)

    def test_tsirelson_bound_on_random_states(self, rng):
        for _ in range(60):
            rho = random_two_qubit_density(rng, mixed=bool(rng.integers(2)))
            assert chsh_optimize(rho, 15.0).value <= 2.0 * np.sqrt(2.0) + 1e-9

    def test_step_must_divide_circle(self):
        with pytest.raises(ValueError):
            chsh_optimize(noisy_state(1.0), 7.0)


class TestLhsFeasibility:
    def test_low_visibility_certified(self):
        asm = compute_assemblage(noisy_state(0.4), ("Z", "X"))
        verdict = lhs_feasibility(asm, 20)
        assert verdict.status == "UnsteerableCertified"
        assert verdict.residual < 1e-7
        assert replay_certificate(verdict, asm) < 1e-7

    def test_high_visibility_not_representable(self):
        asm = compute_assemblage(noisy_state(0.9), ("Z", "X"))
        verdict = lhs_feasibility(asm, 20)
        assert verdict.status == "NoLHSFoundAtResolution"
        assert cjwr_value(noisy_state(0.9), ("Z", "X")) > 1.0

    def test_maximally_mixed_assemblage_certified(self):
        verdict = lhs_feasibility(compute_assemblage(noisy_state(0.0), ("Z", "X")), 20)
        assert verdict.status == "UnsteerableCertified"

    def test_certificate_weights_form_distribution(self):
        asm = compute_assemblage(noisy_state(0.3), ("Z", "X"))
        verdict = lhs_feasibility(asm, 20)
        total = sum(w for _, _, w in verdict.certificate)
        assert total == pytest.approx(1.0, abs=1e-8)
        assert all(w >= 0 for _, _, w in verdict.certificate)

    def test_grid_too_coarse(self):
        asm = compute_assemblage(noisy_state(0.4), ("Z", "X"))
        with pytest.raises(GridTooCoarse):
            lhs_feasibility(asm, 5)

    def test_too_many_settings(self):
        member = np.eye(2) / 4.0
        names = tuple(f"s{i}" for i in range(5))
        asm = Assemblage(names, {(x, a): member for x in names for a in (1, -1)})
        with pytest.raises(TooManySettings):
            lhs_feasibility(asm, 10)

    def test_certification_is_monotone_under_refinement(self):
        for v in (0.0, 0.4, 0.65):
            asm = compute_assemblage(noisy_state(v), ("Z", "X"))
            certified = [
                lhs_feasibility(asm, g).status == "UnsteerableCertified"
                for g in (10, 20, 40)
            ]
            for coarse, fine in zip(certified, certified[1:]):
                assert (not coarse) or fine
        assert lhs_feasibility(
            compute_assemblage(noisy_state(0.4), ("Z", "X")), 10
        ).status == "UnsteerableCertified"

    def test_cjwr_violation_implies_no_lhs(self):
        for v in (0.8, 0.9, 1.0):
            rho = noisy_state(v)
            assert cjwr_value(rho, ("Z", "X")) > 1.0
            for grid in (10, 20):
                verdict = lhs_feasibility(compute_assemblage(rho, ("Z", "X")), grid)
                assert verdict.status == "NoLHSFoundAtResolution"

    def test_three_setting_program(self):
        asm = compute_assemblage(noisy_state(0.4), ("Z", "X", "Y"))
        verdict = lhs_feasibility(asm, 12)
        assert verdict.status == "UnsteerableCertified"


class TestFibonacciGrid:
    def test_unit_vectors(self):
        grid = fibonacci_bloch_grid(400)
        np.testing.assert_allclose(np.linalg.norm(grid, axis=1), 1.0, atol=1e-12)

    def test_deterministic(self):
        np.testing.assert_array_equal(fibonacci_bloch_grid(100), fibonacci_bloch_grid(100))

    def test_covers_both_hemispheres(self):
        grid = fibonacci_bloch_grid(100)
        assert grid[:, 2].max() > 0.9
        assert grid[:, 2].min() < -0.9
