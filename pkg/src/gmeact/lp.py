"""Dense two-phase simplex for equality-form linear programs.

Solves  min c.x  subject to  A x = b,  x >= lb  with a dense tableau.
Entering variable: most negative reduced cost (Bland's least-index rule is
available as an option); leaving variable: least ratio with lexicographic
tie-breaking over the inverse-basis block, which precludes cycling on the
heavily degenerate programs that arise here.  The tableau is periodically
rebuilt from the original data to stop roundoff drift, the final solution is
recomputed from the optimal basis, and every solution is certified (primal
feasibility, dual feasibility, complementary slackness) before it is
returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import tolerances as tol


class LpError(Exception):
    pass


class LpInfeasibleError(LpError):
    pass


class LpUnboundedError(LpError):
    pass


class LpIterationLimitError(LpError):
    pass


class LpCertificationError(LpError):
    """The basis returned by the pivot loop failed the optimality check."""


@dataclass
class LinearProgram:
    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.a_eq = np.atleast_2d(np.asarray(self.a_eq, dtype=float))
        self.b_eq = np.asarray(self.b_eq, dtype=float)
        n = self.objective.size
        if self.a_eq.size == 0:
            self.a_eq = self.a_eq.reshape(0, n)
        if self.a_eq.shape[1] != n or self.a_eq.shape[0] != self.b_eq.size:
            raise ValueError("inconsistent LP dimensions")
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(n)
        else:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)
            if self.lower_bounds.size != n:
                raise ValueError("lower_bounds size mismatch")


@dataclass
class LpSolution:
    value: float
    x: np.ndarray
    duals: np.ndarray
    iterations: int
    basis: np.ndarray = field(repr=False, default=None)


_PIVOT_TOL = 1e-9
_REFRESH_EVERY = 2000


def _basis_matrix(a_s: np.ndarray, basis: np.ndarray) -> np.ndarray:
    m, n = a_s.shape
    bmat = np.zeros((m, m))
    for i, col in enumerate(basis):
        if col < n:
            bmat[:, i] = a_s[:, col]
        else:
            bmat[col - n, i] = 1.0
    return bmat


def _build_tableau(a_s, b_s, costs, basis):
    """Fresh tableau [B^-1 A | B^-1 | B^-1 b; reduced costs] for a basis."""
    m, n = a_s.shape
    bmat = _basis_matrix(a_s, basis)
    full = np.concatenate([a_s, np.eye(m), b_s[:, None]], axis=1)
    try:
        body = np.linalg.solve(bmat, full)
    except np.linalg.LinAlgError as exc:
        raise LpCertificationError(f"singular working basis: {exc}")
    T = np.empty((m + 1, n + m + 1))
    T[:m] = body
    cb = costs[basis]
    T[m] = np.concatenate([costs, [0.0]]) - cb @ body
    return T


def _run_phase(a_s, b_s, costs, basis, n_eligible, maxiter, rule):
    """Pivot with periodic recanonicalization; returns total iterations."""
    total = 0
    while True:
        T = _build_tableau(a_s, b_s, costs, basis)
        budget = min(_REFRESH_EVERY, maxiter - total)
        status, used = kernels.simplex_pivot_loop(
            T, basis, n_eligible, budget, _PIVOT_TOL, rule
        )
        total += used
        if status == kernels.OPTIMAL:
            return total
        if status == kernels.UNBOUNDED:
            raise LpUnboundedError("LP is unbounded")
        if total >= maxiter:
            raise LpIterationLimitError(f"simplex exceeded {maxiter} pivots")
        # MAXITER within this stint: refresh the tableau and continue


def lp_solve(
    lp: LinearProgram,
    maxiter: int | None = None,
    rule: int = kernels.RULE_DANTZIG_LEX,
) -> LpSolution:
    """Solve an equality-form LP and certify the optimum.

    Raises LpInfeasibleError / LpUnboundedError when detected, and
    LpCertificationError if the final basis does not pass the independent
    optimality check at tolerance ``tolerances.LP_OPT``.
    """
    c = lp.objective
    lb = lp.lower_bounds
    a = lp.a_eq
    m, n = a.shape
    if maxiter is None:
        maxiter = 300 * (m + n + 10)

    # shift to u = x - lb >= 0
    b = lp.b_eq - a @ lb
    offset = float(c @ lb)

    if m == 0:
        if np.any(c < -tol.LP_OPT):
            raise LpUnboundedError("LP is unbounded")
        return LpSolution(value=offset, x=lb.copy(), duals=np.zeros(0), iterations=0,
                          basis=np.zeros(0, dtype=np.int64))

    sign = np.where(b < 0, -1.0, 1.0)
    a_s = a * sign[:, None]
    b_s = b * sign

    scale = max(1.0, float(np.abs(b_s).max()))

    # phase 1: artificial costs
    costs1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = np.arange(n, n + m, dtype=np.int64)
    it1 = _run_phase(a_s, b_s, costs1, basis, n, maxiter, rule)
    xb = np.linalg.solve(_basis_matrix(a_s, basis), b_s)
    phase1_obj = float(xb[basis >= n].sum())
    if phase1_obj > 1e-8 * scale:
        raise LpInfeasibleError(f"phase-1 objective {phase1_obj:.3e} > 0")

    # phase 2: real objective; artificials keep cost 0 and may not re-enter
    costs2 = np.concatenate([c, np.zeros(m)])
    it2 = _run_phase(a_s, b_s, costs2, basis, n, maxiter, rule)

    bmat = _basis_matrix(a_s, basis)
    xb = np.linalg.solve(bmat, b_s)
    u = np.zeros(n + m)
    u[basis] = xb
    if np.any(u[n:] > 1e-7 * scale):
        raise LpInfeasibleError("artificial variable stuck at a nonzero level")
    u = np.where(np.abs(u) < 1e-11 * scale, 0.0, u)
    x = u[:n] + lb
    y = np.linalg.solve(bmat.T, costs2[basis]) * sign
    value = float(c @ u[:n]) + offset

    _certify(lp, x, y, value)
    return LpSolution(value=value, x=x, duals=y, iterations=it1 + it2, basis=basis)


def _certify(lp: LinearProgram, x: np.ndarray, y: np.ndarray, value: float) -> None:
    scale = max(
        1.0,
        float(np.abs(lp.b_eq).max(initial=0.0)),
        float(np.abs(lp.objective).max(initial=0.0)),
    )
    resid = float(np.abs(lp.a_eq @ x - lp.b_eq).max(initial=0.0))
    if resid > tol.LP_OPT * scale * 10:
        raise LpCertificationError(f"primal residual {resid:.3e}")
    if np.any(x < lp.lower_bounds - tol.LP_OPT * scale):
        raise LpCertificationError("bound violation in solution")
    reduced = lp.objective - lp.a_eq.T @ y
    if np.any(reduced < -tol.LP_OPT * scale * 10):
        raise LpCertificationError("dual infeasibility: negative reduced cost at optimum")
    slack = float(reduced @ (x - lp.lower_bounds))
    if abs(slack) > tol.LP_OPT * scale * max(10.0, float(np.abs(x).sum())):
        raise LpCertificationError(f"complementary slackness violated: {slack:.3e}")
