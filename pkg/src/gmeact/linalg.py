"""Dense complex linear algebra on multi-party qubit operators.

Index convention, fixed once for the whole package: tensor factors are
ordered party-major with the copy index innermost within a party.  A k-copy
state of N single-qubit parties therefore carries its qubits in the order
A_1 .. A_k  B_1 .. B_k  C_1 .. C_k ...
Basis indices are big-endian, i.e. qubit 0 is the most significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import tolerances as tol
from .kernels import eigh_hermitian

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class ShapeMismatchError(ValueError):
    pass


class NonHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class PartyStructure:
    """Ordered local dimensions of the parties sharing an operator."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if not self.dims:
            raise ValueError("party structure must have at least one party")
        for d in self.dims:
            if d < 1 or d & (d - 1):
                raise ValueError(f"local dimension {d} is not a power of 2")

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @property
    def parties(self) -> int:
        return len(self.dims)


class EigDecomposition(NamedTuple):
    values: np.ndarray  # real, ascending
    vectors: np.ndarray  # orthonormal columns, vectors[:, i] <-> values[i]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def schur_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise (Hadamard) product of two equally shaped matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def _check_op_dims(op: np.ndarray, ps: PartyStructure) -> None:
    if op.shape != (ps.dim, ps.dim):
        raise ShapeMismatchError(
            f"operator shape {op.shape} does not match party structure {ps.dims}"
        )


def partial_transpose(op: np.ndarray, ps: PartyStructure, parties: Iterable[int]) -> np.ndarray:
    """Transpose the indices of the listed parties."""
    op = np.asarray(op)
    _check_op_dims(op, ps)
    n = ps.parties
    parties = set(parties)
    t = op.reshape(ps.dims + ps.dims)
    axes = list(range(2 * n))
    for p in parties:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    return t.transpose(axes).reshape(ps.dim, ps.dim)


def partial_trace(op: np.ndarray, ps: PartyStructure, parties: Iterable[int]) -> np.ndarray:
    """Trace out the listed parties; returns the marginal on the rest."""
    op = np.asarray(op)
    _check_op_dims(op, ps)
    n = ps.parties
    drop = sorted(set(parties))
    t = op.reshape(ps.dims + ps.dims)
    for shift, p in enumerate(drop):
        t = np.trace(t, axis1=p - shift, axis2=n - shift + p - shift)
        # after each trace the tensor has one row and one column axis less
        n -= 1
    keep = [d for i, d in enumerate(ps.dims) if i not in drop]
    d = math.prod(keep) if keep else 1
    return t.reshape(d, d)


def hermitian_eig(h: np.ndarray) -> EigDecomposition:
    """Full spectrum of a Hermitian matrix, eigenvalues ascending.

    Deterministic for a fixed input; raises on non-Hermitian input.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > tol.HERMITICITY * max(1.0, np.max(np.abs(h))):
        raise NonHermitianError("matrix is not Hermitian within tolerance")
    w, v = eigh_hermitian(h)
    return EigDecomposition(w, v)


def min_eigenvalue(h: np.ndarray) -> float:
    return float(hermitian_eig(h).values[0])


def is_psd(h: np.ndarray) -> bool:
    return min_eigenvalue(h) >= -tol.PSD


def permute_qubits(op: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a 2^n x 2^n operator.

    ``order[k]`` is the current position of the qubit that ends up at slot k.
    """
    n = len(order)
    d = 2**n
    if op.shape != (d, d):
        raise ShapeMismatchError(f"operator shape {op.shape} incompatible with {n} qubits")
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of range(n)")
    t = op.reshape((2,) * (2 * n))
    axes = list(order) + [n + q for q in order]
    return t.transpose(axes).reshape(d, d)


def permute_qubits_vec(vec: np.ndarray, order: Sequence[int]) -> np.ndarray:
    n = len(order)
    if vec.shape != (2**n,):
        raise ShapeMismatchError(f"vector shape {vec.shape} incompatible with {n} qubits")
    return vec.reshape((2,) * n).transpose(order).reshape(-1)


def party_major_order(n_parties: int, k: int) -> list[int]:
    """Qubit permutation taking a copy-major k-fold product to party-major order."""
    return [c * n_parties + x for x in range(n_parties) for c in range(k)]


def tensor_copies(rho: np.ndarray, k: int, n_parties: int = 3) -> np.ndarray:
    """k-fold tensor power of an N-qubit state, reordered party-major.

    The result acts on N parties of local dimension 2^k each, with the copy
    index innermost within each party.
    """
    if k < 1:
        raise ValueError("need k >= 1 copies")
    out = rho
    for _ in range(k - 1):
        out = np.kron(out, rho)
    if k == 1:
        return out
    return permute_qubits(out, party_major_order(n_parties, k))


def interleave_party_spaces(a: np.ndarray, dims_a: Sequence[int], b: np.ndarray, dims_b: Sequence[int]) -> np.ndarray:
    """Merge two N-party operators into one on parties of dimension d_a*d_b.

    Within each party, a's factor is major and b's minor.
    """
    if len(dims_a) != len(dims_b):
        raise ShapeMismatchError("party counts differ")
    n = len(dims_a)
    full = np.kron(a, b)
    dims = tuple(dims_a) + tuple(dims_b)
    t = full.reshape(dims + dims)
    perm = [i for p in range(n) for i in (p, n + p)]
    axes = perm + [2 * n + i for i in perm]
    t = t.transpose(axes)
    d = math.prod(dims_a) * math.prod(dims_b)
    return t.reshape(d, d)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2
