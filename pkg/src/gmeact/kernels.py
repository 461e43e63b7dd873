"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set ``GMEACT_BACKEND=py`` (or ``c``) to force a backend; the default ``auto``
prefers the compiled kernels.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_choice = os.environ.get("GMEACT_BACKEND", "auto").lower()

if _choice in ("auto", "c"):
    try:
        from . import _ckernels as _impl

        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        _impl = _pykernels
        BACKEND = "py"
elif _choice == "py":
    _impl = _pykernels
    BACKEND = "py"
else:
    raise ValueError(f"unknown GMEACT_BACKEND {_choice!r}")

OPTIMAL = _pykernels.OPTIMAL
UNBOUNDED = _pykernels.UNBOUNDED
MAXITER = _pykernels.MAXITER
RULE_DANTZIG_LEX = _pykernels.RULE_DANTZIG_LEX
RULE_BLAND = _pykernels.RULE_BLAND

JacobiConvergenceError = _pykernels.JacobiConvergenceError


def backend_name() -> str:
    return BACKEND


def eigh_hermitian(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(eigenvalues ascending, eigenvector columns) of a Hermitian matrix."""
    return _impl.eigh_jacobi(np.ascontiguousarray(a, dtype=np.complex128))


def simplex_pivot_loop(
    tableau: np.ndarray,
    basis: np.ndarray,
    n_eligible: int,
    maxiter: int,
    tol: float,
    rule: int = RULE_DANTZIG_LEX,
) -> tuple[int, int]:
    """Run simplex pivots in place; see ``_pykernels.simplex_pivot_loop``."""
    return _impl.simplex_pivot_loop(tableau, basis, n_eligible, maxiter, tol, rule)
