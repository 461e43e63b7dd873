"""Local projections between multi-copy and single-copy spaces.

A ProjectionSet holds one 2 x 2^k matrix per party; applying it compresses a
k-copy state (party-major qubit order) to a single qubit per party.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tolerances as tol
from .linalg import NonHermitianError, kron_all
from .states import GhzDiagCoeffs, ghz_basis_state


class ZeroNormalizationError(ValueError):
    """The projection annihilated the state's support."""


@dataclass(frozen=True)
class ProjectionSet:
    """Per-party local projection matrices, scaled to unit operator norm."""

    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        norm_mats = []
        for f in self.mats:
            f = np.asarray(f, dtype=complex)
            if f.ndim != 2 or f.shape[0] != 2:
                raise ValueError(f"projection matrices must be 2 x d, got {f.shape}")
            top = np.linalg.norm(f, 2)
            if top == 0:
                raise ValueError("zero projection matrix")
            norm_mats.append(f / top)
        object.__setattr__(self, "mats", tuple(norm_mats))

    @property
    def parties(self) -> int:
        return len(self.mats)

    def to_json(self) -> str:
        payload = {
            "parties": self.parties,
            "matrices": [
                [[[float(z.real), float(z.imag)] for z in row] for row in f]
                for f in self.mats
            ],
        }
        return json.dumps(payload)

    @staticmethod
    def from_json(text: str) -> "ProjectionSet":
        payload = json.loads(text)
        mats = []
        for rows in payload["matrices"]:
            mats.append(np.array([[complex(re, im) for re, im in row] for row in rows]))
        if len(mats) != payload["parties"]:
            raise ValueError("party count mismatch in serialized projection set")
        return ProjectionSet(tuple(mats))


@dataclass(frozen=True)
class ProjectedState:
    operator: np.ndarray
    normalization: float


def hadamard_isometry(k: int) -> np.ndarray:
    """|0><0...0| + |1><1...1| mapping k copies of a qubit to one qubit."""
    if k < 1:
        raise ValueError("need k >= 1")
    e = np.zeros((2, 2**k), dtype=complex)
    e[0, 0] = 1.0
    e[1, -1] = 1.0
    return e


def hadamard_projection_set(k: int, parties: int = 3) -> ProjectionSet:
    return ProjectionSet(tuple(hadamard_isometry(k) for _ in range(parties)))


def apply_projection(rho: np.ndarray, proj: ProjectionSet) -> ProjectedState:
    """Compress a multi-copy state; raises if the image has zero trace."""
    k = kron_all(*proj.mats)
    if k.shape[1] != rho.shape[0]:
        raise ValueError(
            f"projection acts on dimension {k.shape[1]}, state has {rho.shape[0]}"
        )
    raw = k @ rho @ k.conj().T
    norm = float(np.trace(raw).real)
    if norm <= tol.ZERO_NORM:
        raise ZeroNormalizationError(f"projected trace {norm:.3e}")
    op = raw / norm
    return ProjectedState(operator=(op + op.conj().T) / 2, normalization=norm)


def vector_to_projection(a: np.ndarray) -> np.ndarray:
    """Reshape a product-vector component into its 2 x d projection matrix.

    The convention is fixed so that for vectors a, b, c and the matching
    matrices F_A, F_B, F_C the product-vector expectation value of
    (k-copy state) (x) (witness) equals the witness expectation value of the
    projected k-copy state.
    """
    a = np.asarray(a, dtype=complex).ravel()
    if a.size % 2 or a.size == 0:
        raise ValueError("vector length must be a positive multiple of 2")
    if np.max(np.abs(a)) == 0:
        raise ValueError("zero vector")
    return a.reshape(-1, 2).conj().T


def projection_to_vector(f: np.ndarray) -> np.ndarray:
    """Inverse of vector_to_projection."""
    return np.asarray(f, dtype=complex).conj().T.ravel()


def schur_power(rho: np.ndarray, k: int) -> np.ndarray:
    """Normalized entrywise k-th power of a density matrix."""
    if k < 1:
        raise ValueError("need k >= 1")
    s = rho**k
    trace = float(np.trace(s).real)
    if trace <= tol.ZERO_NORM:
        raise ZeroNormalizationError(f"Schur power trace {trace:.3e}")
    return s / trace


@dataclass(frozen=True)
class LiftedWitness:
    """Witness lifted from the single-copy to the k-copy space.

    ``dense`` is the explicit operator in party-major order (small k only);
    ``evaluate`` works for any k through the entrywise-power identity.
    """

    base: np.ndarray
    k: int
    dense: np.ndarray | None
    diag: np.ndarray | None
    antidiag: np.ndarray | None

    def evaluate(self, rho: np.ndarray) -> float:
        """Value on k copies of rho, as the single-copy nonlinear expression."""
        return float(np.real(np.einsum("uv,vu->", self.base, rho**self.k)))


def lift_witness(w: np.ndarray, k: int, dense_max_dim: int = 64) -> LiftedWitness:
    """Pull a single-copy witness back through the k-copy compression map."""
    w = np.asarray(w, dtype=complex)
    if np.max(np.abs(w - w.conj().T)) > tol.HERMITICITY * max(1.0, np.max(np.abs(w))):
        raise NonHermitianError("witness must be Hermitian")
    d = w.shape[0]
    n_parties = int(round(np.log2(d)))
    dense = None
    if (2**k) ** n_parties <= dense_max_dim or k == 1:
        lift = hadamard_isometry(k).conj().T
        big = kron_all(*([lift] * n_parties))
        dense = big @ w @ big.conj().T
    diag = antidiag = None
    x_part = np.zeros_like(w)
    idx = np.arange(d)
    x_part[idx, idx] = w[idx, idx]
    x_part[idx, d - 1 - idx] = w[idx, d - 1 - idx]
    if np.max(np.abs(w - x_part)) <= 1e-12:
        diag = np.real(np.diag(w)).copy()
        antidiag = w[idx, d - 1 - idx].copy()
    return LiftedWitness(base=w, k=k, dense=dense, diag=diag, antidiag=antidiag)


def d_projections() -> ProjectionSet:
    """The fixed two-copy projection family behind the distillation criterion."""
    s = 1 / np.sqrt(2)
    f_a = np.array([[s, s, 0, 0], [0, 0, s, -s]], dtype=complex)
    f_b = np.array([[0, 0, s, s], [s, -s, 0, 0]], dtype=complex)
    f_c = np.array([[s, s, 0, 0], [0, 0, s, s]], dtype=complex)
    return ProjectionSet((f_a, f_b, f_c))


def projected_chi_closed_form(mu: float, eps: float, delta: float) -> GhzDiagCoeffs:
    """Closed-form image of chi(1, mu, eps, delta)^(x)2 under d_projections."""
    if not (1 + 1e-12 >= mu >= eps >= delta >= 0):
        raise ValueError("need 1 >= mu >= eps >= delta >= 0")
    norm = (eps + delta) * (1 + mu + eps + delta)
    if norm <= tol.ZERO_NORM:
        raise ZeroNormalizationError("projected state vanishes for eps = delta = 0")
    w = np.zeros(8)
    w[0] = eps * (1 + mu)
    w[1] = eps * (eps + delta)
    w[2] = delta * (1 + mu)
    w[3] = delta * (eps + delta)
    return GhzDiagCoeffs(w / norm)


def ghz_fidelity_after(rho2: np.ndarray, proj: ProjectionSet) -> float:
    """GHZ fidelity of the normalized image of rho2 under the projection."""
    image = apply_projection(rho2, proj)
    ghz = ghz_basis_state(1, +1)
    return float(np.real(ghz.conj() @ image.operator @ ghz))
