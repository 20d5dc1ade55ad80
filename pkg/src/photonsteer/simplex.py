"""Phase-one simplex feasibility solver.

Decides whether ``A x = b, x >= 0`` has a solution by minimizing the sum of
artificial variables. Revised form: every iteration refactorizes the
basis and recomputes reduced costs from scratch, so no error accumulates
across pivots (these steering programs are heavily degenerate and may take
thousands of them). Bland's rule (lowest improving column in, lowest basis
index on ratio ties out) guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    x: np.ndarray | None  # structural solution when feasible
    objective: float  # phase-1 optimum (sum of artificials)
    residual: float  # max |A x - b| recomputed from scratch
    iterations: int


def solve_feasibility(
    A: np.ndarray,
    b: np.ndarray,
    feas_tol: float = FEAS_TOL,
    pivot_tol: float = PIVOT_TOL,
    max_iterations: int = 20000,
) -> FeasibilityResult:
    """Search for x >= 0 with A x = b."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError(f"b has shape {b.shape}, expected ({m},)")

    # Artificial basis needs b >= 0.
    flip = b < 0
    work_A = np.where(flip[:, None], -A, A)
    work_b = np.where(flip, -b, b)

    ext = np.hstack([work_A, np.eye(m)])  # structural | artificial
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = np.arange(n, n + m)

    iterations = 0
    while True:
        B = ext[:, basis]
        try:
            x_basic = np.linalg.solve(B, work_b)
            duals = np.linalg.solve(B.T, cost[basis])
        except np.linalg.LinAlgError as exc:
            raise ArithmeticError(f"singular basis after {iterations} iterations") from exc

        reduced = cost - duals @ ext
        improving = np.nonzero(reduced < -pivot_tol)[0]
        if improving.size == 0:
            break
        entering = int(improving[0])  # Bland: lowest index

        direction = np.linalg.solve(B, ext[:, entering])
        movable = direction > pivot_tol
        if not movable.any():
            # Phase-1 objective is bounded below by zero, so an unbounded ray
            # means numerical breakdown, not a real certificate.
            raise ArithmeticError("phase-1 ratio test failed on all rows")
        ratios = np.full(m, np.inf)
        ratios[movable] = np.maximum(x_basic[movable], 0.0) / direction[movable]
        theta = ratios.min()
        ties = np.nonzero(ratios <= theta + pivot_tol)[0]
        leaving = int(ties[np.argmin(basis[ties])])  # Bland: lowest basis index

        basis[leaving] = entering
        iterations += 1
        if iterations > max_iterations:
            raise ArithmeticError(f"phase-1 did not converge in {max_iterations} iterations")

    objective = float(cost[basis] @ np.maximum(x_basic, 0.0))
    if objective > feas_tol:
        return FeasibilityResult(False, None, objective, objective, iterations)

    x = np.zeros(n)
    structural = basis < n
    x[basis[structural]] = np.maximum(x_basic[structural], 0.0)
    residual = float(np.max(np.abs(A @ x - b))) if m else 0.0
    return FeasibilityResult(True, x, objective, residual, iterations)
