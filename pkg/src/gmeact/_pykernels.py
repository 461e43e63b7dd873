"""Pure-Python (numpy) kernels: cyclic Jacobi eigensolver and simplex pivots.

These mirror the compiled kernels in ``_ckernels.pyx`` operation for
operation so both backends take identical pivot/rotation decisions and
produce matching output.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
MAXITER = 2

_JACOBI_MAX_SWEEPS = 64


class JacobiConvergenceError(RuntimeError):
    pass


def _offdiag_norm(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(np.abs(a[mask]) ** 2)))


def eigh_jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvector columns).
    """
    A = np.array(a, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([A[0, 0].real]), V

    fro = float(np.linalg.norm(A))
    stop = 1e-14 * max(1.0, fro)
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _offdiag_norm(A) <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= 1e-18 * (abs(A[p, p].real) + abs(A[q, q].real)) or r == 0.0:
                    continue
                f = apq / r
                tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                scf = s * np.conj(f)
                sf = s * f
                # columns: A <- A U with U = [[c, s], [-s conj(f), c conj(f)]]
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - scf * aq
                A[:, q] = s * ap + np.conj(f) * (c * aq)
                # rows: A <- U^dag A
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - sf * aq
                A[q, :] = s * ap + f * (c * aq)
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - scf * vq
                V[:, q] = s * vp + np.conj(f) * (c * vq)
    else:
        if _offdiag_norm(A) > 1e-11 * max(1.0, fro):
            raise JacobiConvergenceError("Jacobi sweeps did not converge")

    w = np.real(np.diag(A)).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    # fix the phase: largest-modulus component of each column real positive
    for j in range(n):
        i0 = int(np.argmax(np.abs(V[:, j])))
        ph = V[i0, j]
        m = abs(ph)
        if m > 0:
            V[:, j] *= np.conj(ph) / m
    return w, V


RULE_DANTZIG_LEX = 0
RULE_BLAND = 1


def _lex_leave(T, ties, j, m, n):
    """Narrow tied rows by lexicographic comparison of row / pivot entry.

    The columns n - m .. n - 1 of the tableau hold the inverse-basis block,
    so comparing them row-wise realizes the classic lexicographic rule.
    """
    cand = list(ties)
    for col in range(n - m, n):
        if len(cand) == 1:
            break
        vals = [T[i, col] / T[i, j] for i in cand]
        best = min(vals)
        cand = [i for i, v in zip(cand, vals) if v <= best + 1e-12 * (1.0 + abs(best))]
    return cand[0]


def simplex_pivot_loop(
    T: np.ndarray,
    basis: np.ndarray,
    n_eligible: int,
    maxiter: int,
    tol: float,
    rule: int = RULE_DANTZIG_LEX,
) -> tuple[int, int]:
    """Primal simplex pivots, in place, on a dense tableau.

    T has m constraint rows, one reduced-cost row (last), the rhs in the last
    column, and the inverse-basis block in the m columns before it.
    Entering: most negative reduced cost, first index on ties (or Bland's
    least index under RULE_BLAND); leaving: least ratio with lexicographic
    tie-breaking, which precludes cycling.
    """
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    obj_row = T[m]
    for it in range(maxiter):
        red = obj_row[:n_eligible]
        if rule == RULE_BLAND:
            neg = np.nonzero(red < -tol)[0]
            if neg.size == 0:
                return OPTIMAL, it
            j = int(neg[0])
        else:
            j = int(np.argmin(red))
            if red[j] >= -tol:
                return OPTIMAL, it
        col = T[:m, j]
        rhs = T[:m, n]
        ratios = np.full(m, np.inf)
        pos = col > tol
        ratios[pos] = rhs[pos] / col[pos]
        best = ratios.min()
        if not np.isfinite(best):
            return UNBOUNDED, it
        ties = np.nonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))[0]
        if ties.size == 1:
            leave = int(ties[0])
        else:
            leave = int(_lex_leave(T, ties, j, m, n))
        piv = T[leave, j]
        T[leave, :] /= piv
        colv = T[:, j].copy()
        colv[leave] = 0.0
        T -= np.outer(colv, T[leave, :])
        T[:, j] = 0.0
        T[leave, j] = 1.0
        basis[leave] = j
    return MAXITER, maxiter
