# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cyclic Jacobi eigensolver and simplex pivot loop.

Twin of ``_pykernels``; both take identical rotation/pivot decisions.
"""

import numpy as np

cimport cython
from libc.math cimport fabs, sqrt, INFINITY

from gmeact._pykernels import JacobiConvergenceError

OPTIMAL = 0
UNBOUNDED = 1
MAXITER = 2

cdef Py_ssize_t JACOBI_MAX_SWEEPS = 64


cdef inline double _cabs2(double re, double im) nogil:
    return re * re + im * im


def eigh_jacobi(a):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations."""
    A_arr = np.array(a, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = A_arr.shape[0]
    V_arr = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([A_arr[0, 0].real]), V_arr

    cdef double complex[:, ::1] A = A_arr
    cdef double complex[:, ::1] V = V_arr
    cdef double fro = float(np.linalg.norm(A_arr))
    cdef double stop = 1e-14 * max(1.0, fro)
    cdef Py_ssize_t sweep, p, q, i
    cdef double r, tau, t, c, s, off
    cdef double complex apq, f, scf, sf, ap, aq
    cdef bint converged = False

    for sweep in range(JACOBI_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += _cabs2(A[p, q].real, A[p, q].imag)
        if sqrt(off) <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = sqrt(_cabs2(apq.real, apq.imag))
                if r <= 1e-18 * (fabs(A[p, p].real) + fabs(A[q, q].real)) or r == 0.0:
                    continue
                f = apq / r
                tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                scf = s * f.conjugate()
                sf = s * f
                for i in range(n):
                    ap = A[i, p]
                    aq = A[i, q]
                    A[i, p] = c * ap - scf * aq
                    A[i, q] = s * ap + f.conjugate() * (c * aq)
                for i in range(n):
                    ap = A[p, i]
                    aq = A[q, i]
                    A[p, i] = c * ap - sf * aq
                    A[q, i] = s * ap + f * (c * aq)
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for i in range(n):
                    ap = V[i, p]
                    aq = V[i, q]
                    V[i, p] = c * ap - scf * aq
                    V[i, q] = s * ap + f.conjugate() * (c * aq)
    if not converged:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += _cabs2(A[p, q].real, A[p, q].imag)
        if sqrt(off) > 1e-11 * max(1.0, fro):
            raise JacobiConvergenceError("Jacobi sweeps did not converge")

    w = np.real(np.diag(A_arr)).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V_out = np.ascontiguousarray(V_arr[:, order])
    cdef Py_ssize_t j, i0
    cdef double best, mag
    cdef double complex ph
    cdef double complex[:, ::1] Vo = V_out
    for j in range(n):
        i0 = 0
        best = -1.0
        for i in range(n):
            mag = _cabs2(Vo[i, j].real, Vo[i, j].imag)
            if mag > best:
                best = mag
                i0 = i
        ph = Vo[i0, j]
        mag = sqrt(_cabs2(ph.real, ph.imag))
        if mag > 0.0:
            ph = ph.conjugate() / mag
            for i in range(n):
                Vo[i, j] = Vo[i, j] * ph
    return w, V_out


RULE_DANTZIG_LEX = 0
RULE_BLAND = 1


def simplex_pivot_loop(T_arr, basis_arr, Py_ssize_t n_eligible, Py_ssize_t maxiter,
                       double tol, Py_ssize_t rule):
    """Primal simplex pivots, in place, on a dense tableau.

    Same contract and decision rules as ``_pykernels.simplex_pivot_loop``:
    Dantzig (or Bland) entering, least ratio with lexicographic tie-breaking
    over the inverse-basis block for leaving.
    """
    cdef double[:, ::1] T = T_arr
    cdef long long[::1] basis = basis_arr
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t n = T.shape[1] - 1
    cdef Py_ssize_t it, j, i, k, leave, ncand, nkeep, col
    cdef double red, ratio, best, piv, factor, v
    cand_arr = np.empty(m, dtype=np.int64)
    cdef long long[::1] cand = cand_arr

    for it in range(maxiter):
        j = -1
        if rule == RULE_BLAND:
            for k in range(n_eligible):
                if T[m, k] < -tol:
                    j = k
                    break
            if j < 0:
                return OPTIMAL, it
        else:
            red = 0.0
            for k in range(n_eligible):
                if T[m, k] < red:
                    red = T[m, k]
                    j = k
            if j < 0 or red >= -tol:
                return OPTIMAL, it
        best = INFINITY
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, n] / T[i, j]
                if ratio < best:
                    best = ratio
        if best == INFINITY:
            return UNBOUNDED, it
        ncand = 0
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, n] / T[i, j]
                if ratio <= best + 1e-12 * (1.0 + fabs(best)):
                    cand[ncand] = i
                    ncand += 1
        if ncand > 1:
            for col in range(n - m, n):
                if ncand == 1:
                    break
                best = INFINITY
                for k in range(ncand):
                    i = cand[k]
                    v = T[i, col] / T[i, j]
                    if v < best:
                        best = v
                nkeep = 0
                for k in range(ncand):
                    i = cand[k]
                    v = T[i, col] / T[i, j]
                    if v <= best + 1e-12 * (1.0 + fabs(best)):
                        cand[nkeep] = i
                        nkeep += 1
                ncand = nkeep
        leave = cand[0]
        piv = T[leave, j]
        for k in range(n + 1):
            T[leave, k] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            factor = T[i, j]
            if factor != 0.0:
                for k in range(n + 1):
                    T[i, k] -= factor * T[leave, k]
        for i in range(m + 1):
            T[i, j] = 0.0
        T[leave, j] = 1.0
        basis[leave] = j
    return MAXITER, maxiter
