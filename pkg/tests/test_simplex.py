"""Feasibility-solver tests against hand-checkable linear programs."""

import numpy as np
import pytest

from photonsteer.simplex import solve_feasibility


class TestFeasibleSystems:
    def test_identity_system(self):
        result = solve_feasibility(np.eye(3), np.array([1.0, 2.0, 0.5]))
        assert result.feasible
        np.testing.assert_allclose(result.x, [1.0, 2.0, 0.5], atol=1e-10)
        assert result.residual < 1e-10

    def test_underdetermined_system(self):
        A = np.array([[1.0, 1.0, 1.0]])
        result = solve_feasibility(A, np.array([2.0]))
        assert result.feasible
        assert result.x.min() >= 0
        assert abs(result.x.sum() - 2.0) < 1e-10

    def test_negative_rhs_handled_by_row_flip(self):
        A = np.array([[-1.0, 0.0], [0.0, 1.0]])
        result = solve_feasibility(A, np.array([-3.0, 1.0]))
        assert result.feasible
        np.testing.assert_allclose(A @ result.x, [-3.0, 1.0], atol=1e-10)

    def test_degenerate_rows(self):
        A = np.array([[1.0, 1.0], [2.0, 2.0]])
        result = solve_feasibility(A, np.array([1.0, 2.0]))
        assert result.feasible

    def test_random_constructive_instances(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            m, n = int(rng.integers(2, 8)), int(rng.integers(8, 40))
            A = rng.normal(size=(m, n))
            x_true = np.where(rng.random(n) < 0.3, rng.random(n), 0.0)
            result = solve_feasibility(A, A @ x_true)
            assert result.feasible
            assert result.residual < 1e-8


class TestInfeasibleSystems:
    def test_conflicting_rows(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0]])
        result = solve_feasibility(A, np.array([1.0, 2.0]))
        assert not result.feasible
        assert result.objective > 1e-3

    def test_sign_blocked(self):
        # x1 + x2 = -1 has no nonnegative solution.
        result = solve_feasibility(np.array([[1.0, 1.0]]), np.array([-1.0]))
        assert not result.feasible

    def test_overconstrained(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        result = solve_feasibility(A, np.array([1.0, 1.0, 3.0]))
        assert not result.feasible


class TestValidation:
    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            solve_feasibility(np.eye(2), np.ones(3))
