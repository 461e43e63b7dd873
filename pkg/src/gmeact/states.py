"""Constructors and classifiers for the three-qubit state families.

GHZ-basis weights are kept in the canonical order
(+1, -1, +2, -2, +3, -3, +4, -4), where m = 1..4 labels the bit strings
000, 001, 010, 100 and the sign the relative phase.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tolerances as tol
from .linalg import (
    PAULI_X,
    PAULI_Z,
    PartyStructure,
    hermitian_eig,
    kron_all,
    permute_qubits,
)

_GHZ_BITSTRINGS = (0b000, 0b001, 0b010, 0b100)  # m = 1, 2, 3, 4


class SeparabilityClass(enum.Enum):
    PARTITION_SEPARABLE = "PartitionSeparable"
    BISEPARABLE = "Biseparable"
    GME = "GME"


def ghz_basis_state(m: int, sign: int) -> np.ndarray:
    """GHZ basis vector (|b> + sign |b_flipped>)/sqrt(2), b indexed by m."""
    if m not in (1, 2, 3, 4):
        raise ValueError(f"m must be in 1..4, got {m}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    b = _GHZ_BITSTRINGS[m - 1]
    v = np.zeros(8, dtype=complex)
    v[b] = 1 / np.sqrt(2)
    v[7 - b] = sign / np.sqrt(2)
    return v


def ghz_basis_matrix() -> np.ndarray:
    """8x8 matrix whose columns are the GHZ basis vectors in canonical order."""
    cols = []
    for m in (1, 2, 3, 4):
        cols.append(ghz_basis_state(m, +1))
        cols.append(ghz_basis_state(m, -1))
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class GhzDiagCoeffs:
    """Probability weights of a GHZ-diagonal state, canonical order."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.shape != (8,):
            raise ValueError("need 8 weights")
        if np.any(w < -1e-12):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {w.sum()}")

    def to_density(self) -> np.ndarray:
        basis = ghz_basis_matrix()
        return (basis * self.weights) @ basis.conj().T

    def x_entries(self) -> tuple[np.ndarray, np.ndarray]:
        """(diagonal, antidiagonal) entries per pair m of the X-form matrix."""
        plus = self.weights[0::2]
        minus = self.weights[1::2]
        return (plus + minus) / 2, (plus - minus) / 2


def ghz_weights_of(rho: np.ndarray) -> np.ndarray:
    """Diagonal of rho in the GHZ basis (not a twirl; see ghz_twirl)."""
    basis = ghz_basis_matrix()
    return np.real(np.einsum("ui,uv,vi->i", basis.conj(), rho, basis))


def weights_from_x_entries(diag, antidiag) -> list:
    """Interleave per-pair (diagonal, antidiagonal) X-entries into weights.

    Exact for Fraction inputs; no normalization is applied.
    """
    out = []
    for d, a in zip(diag, antidiag):
        out.append(d + a)
        out.append(d - a)
    return out


def ghz_weights_schur_power(weights: Sequence, k: int):
    """Weights of the normalized k-fold Schur power of a GHZ-diagonal state.

    Pure number arithmetic, so Fraction inputs give an exact result.
    """
    plus = list(weights[0::2])
    minus = list(weights[1::2])
    diag = [(p + q) / 2 for p, q in zip(plus, minus)]
    anti = [(p - q) / 2 for p, q in zip(plus, minus)]
    new = weights_from_x_entries([d**k for d in diag], [a**k for a in anti])
    norm = sum(new)
    if norm <= 0:
        raise ValueError("Schur power has vanishing trace")
    return [w / norm for w in new]


@dataclass(frozen=True)
class XState:
    """X-form state data: diagonal pairs lambdas, antidiagonal pairs mus."""

    lambdas: tuple[float, float, float, float]
    mus: tuple[float, float, float, float]

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        mu = tuple(float(v) for v in self.mus)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "mus", mu)
        if any(lam[i] < lam[i + 1] - 1e-12 for i in range(3)) or lam[3] < -1e-12:
            raise ValueError("lambdas must be nonnegative and descending")
        if any(abs(m) > l + 1e-12 for m, l in zip(mu, lam)):
            raise ValueError("positivity requires |mu_i| <= lambda_i")

    @property
    def norm(self) -> float:
        return 2 * sum(self.lambdas)

    def to_density(self) -> np.ndarray:
        z = self.norm
        if z <= 0:
            raise ValueError("all-zero X state")
        rho = np.zeros((8, 8), dtype=complex)
        for i, (lam, mu) in enumerate(zip(self.lambdas, self.mus)):
            rho[i, i] = rho[7 - i, 7 - i] = lam / z
            rho[i, 7 - i] = rho[7 - i, i] = mu / z
        return rho

    def ghz_weights(self) -> GhzDiagCoeffs:
        z = self.norm
        w = np.empty(8)
        for i, (lam, mu) in enumerate(zip(self.lambdas, self.mus)):
            w[2 * i] = (lam + mu) / z
            w[2 * i + 1] = (lam - mu) / z
        return GhzDiagCoeffs(w)


def x_entries_from_density(rho: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair (diagonal, antidiagonal) entries of an X-form 8x8 matrix."""
    rho = np.asarray(rho)
    diag = np.empty(4)
    anti = np.empty(4)
    for i in range(4):
        diag[i] = (rho[i, i].real + rho[7 - i, 7 - i].real) / 2
        anti[i] = (rho[i, 7 - i] + rho[7 - i, i]).real / 2
    if check:
        rebuilt = np.zeros((8, 8), dtype=complex)
        for i in range(4):
            rebuilt[i, i] = rebuilt[7 - i, 7 - i] = diag[i]
            rebuilt[i, 7 - i] = rebuilt[7 - i, i] = anti[i]
        if np.max(np.abs(rho - rebuilt)) > 1e-9:
            raise ValueError("matrix is not in X form")
    return diag, anti


def make_chi(l1: float, l2: float, l3: float, l4: float) -> np.ndarray:
    """Normalized shorthand X-state with antidiagonal equal to diagonal."""
    lams = (l1, l2, l3, l4)
    if sum(lams) <= 0:
        raise ValueError("all-zero input")
    return XState(lams, lams).to_density()


def classify_chi(l1: float, l2: float, l3: float, l4: float) -> SeparabilityClass:
    """Separability class of the shorthand state chi(l1..l4)."""
    lams = (l1, l2, l3, l4)
    if any(lams[i] < lams[i + 1] - 1e-12 for i in range(3)) or l4 < -1e-12:
        raise ValueError("lambdas must be nonnegative and descending")
    if l1 > l2 + l3 + l4:
        return SeparabilityClass.GME
    if abs(l1 - l2) <= 1e-12 and abs(l3 - l4) <= 1e-12:
        return SeparabilityClass.PARTITION_SEPARABLE
    return SeparabilityClass.BISEPARABLE


_TWIRL_GENERATORS = (
    kron_all(PAULI_Z, PAULI_Z, np.eye(2)),
    kron_all(PAULI_X, PAULI_X, PAULI_X),
    kron_all(np.eye(2), PAULI_Z, PAULI_Z),
)


def _twirl_group() -> list[np.ndarray]:
    group = []
    for bits in range(8):
        g = np.eye(8, dtype=complex)
        for i in range(3):
            if bits >> i & 1:
                g = g @ _TWIRL_GENERATORS[i]
        group.append(g)
    return group


_TWIRL_GROUP = _twirl_group()


def ghz_twirl(rho: np.ndarray) -> GhzDiagCoeffs:
    """Average rho over the GHZ symmetry group; result is GHZ diagonal."""
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("twirl expects a unit-trace input")
    avg = sum(g @ rho @ g for g in _TWIRL_GROUP) / 8
    return GhzDiagCoeffs(ghz_weights_of(avg))


def mix_white_noise(rho: np.ndarray, p: float) -> np.ndarray:
    """p * rho + (1-p) * maximally mixed."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    d = rho.shape[0]
    return p * rho + (1 - p) * np.eye(d) / d


@dataclass(frozen=True)
class GhzSymmetricPoint:
    x: float
    y: float


def ghz_symmetric_coords(rho: np.ndarray) -> GhzSymmetricPoint:
    """(x, y) coordinates of a state in the GHZ-symmetric plane."""
    ghz_p = ghz_basis_state(1, +1)
    ghz_m = ghz_basis_state(1, -1)
    fp = float(np.real(ghz_p.conj() @ rho @ ghz_p))
    fm = float(np.real(ghz_m.conj() @ rho @ ghz_m))
    return GhzSymmetricPoint(x=(fp - fm) / 2, y=(-0.25 + fp + fm) / np.sqrt(3))


def ghz_symmetric_state(x: float, y: float) -> np.ndarray:
    """GHZ-symmetric state with the given plane coordinates."""
    total = np.sqrt(3) * y + 0.25
    a_plus = total / 2 + x
    a_minus = total / 2 - x
    rest = 1.0 - total
    if a_plus < -1e-12 or a_minus < -1e-12 or rest < -1e-12:
        raise ValueError(f"({x}, {y}) lies outside the physical triangle")
    w = np.full(8, max(rest, 0.0) / 6)
    w[0] = max(a_plus, 0.0)
    w[1] = max(a_minus, 0.0)
    return GhzDiagCoeffs(w / w.sum()).to_density()


def ghz_witness(kappa: float = 0.5) -> np.ndarray:
    """Fidelity-type witness  kappa * identity - |GHZ+><GHZ+|."""
    ghz = ghz_basis_state(1, +1)
    return kappa * np.eye(8, dtype=complex) - np.outer(ghz, ghz.conj())


def ghz_witness_weights(kappa: float = 0.5) -> np.ndarray:
    """GHZ-basis coefficients of ghz_witness(kappa)."""
    w = np.full(8, kappa)
    w[0] = kappa - 1.0
    return w


# ---------------------------------------------------------------------------
# named families

def rho_sym() -> np.ndarray:
    rho = np.eye(8, dtype=complex)
    rho[0, 0] = 0.0
    rho[7, 7] = 0.0
    return rho / 6


def rho_act() -> np.ndarray:
    ghz = ghz_basis_state(1, +1)
    return (np.outer(ghz, ghz.conj()) + rho_sym()) / 2


def noisy_ghz(p: float) -> np.ndarray:
    ghz = ghz_basis_state(1, +1)
    return mix_white_noise(np.outer(ghz, ghz.conj()), p)


def werner(p: float) -> np.ndarray:
    """Singlet with white noise; invariant under U (x) U."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1 / np.sqrt(2)
    psi[2] = -1 / np.sqrt(2)
    return p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4


def rho_ice_symmetric(p: float) -> np.ndarray:
    """Even mixture of a shared Werner pair over all three party pairs."""
    s = werner(p)
    eye = np.eye(2) / 2
    ab = np.kron(s, eye)
    bc = np.kron(eye, s)
    ac = permute_qubits(np.kron(s, eye), [0, 2, 1])
    return (ab + bc + ac) / 3


def rho_ice_asymmetric(p: float) -> np.ndarray:
    """Werner pair shared on AB and on BC only."""
    s = werner(p)
    eye = np.eye(2) / 2
    return (np.kron(s, eye) + np.kron(eye, s)) / 2


def rho1_weights(p_plus1: float, p_minus1: float) -> np.ndarray:
    if p_plus1 < 0 or p_minus1 < 0 or p_plus1 + p_minus1 > 1 + 1e-12:
        raise ValueError("invalid probability parameters")
    w = np.full(8, (1 - p_plus1 - p_minus1) / 8)
    w[0] += p_plus1
    w[1] += p_minus1
    return w


def rho1(p_plus1: float, p_minus1: float) -> np.ndarray:
    return GhzDiagCoeffs(rho1_weights(p_plus1, p_minus1)).to_density()


def rho2_weights(p_plus1: float, p_plus2: float) -> np.ndarray:
    if p_plus1 < 0 or p_plus2 < 0 or p_plus1 + p_plus2 > 1 + 1e-12:
        raise ValueError("invalid probability parameters")
    w = np.full(8, (1 - p_plus1 - p_plus2) / 8)
    w[0] += p_plus1
    w[2] += p_plus2
    return w


def rho2(p_plus1: float, p_plus2: float) -> np.ndarray:
    return GhzDiagCoeffs(rho2_weights(p_plus1, p_plus2)).to_density()


_FAMILIES = {
    "chi": (make_chi, 4),
    "rho_sym": (rho_sym, 0),
    "rho_act": (rho_act, 0),
    "werner": (werner, 1),
    "rho_s": (rho_ice_symmetric, 1),
    "rho_u": (rho_ice_asymmetric, 1),
    "rho1": (rho1, 2),
    "rho2": (rho2, 2),
    "noisy_ghz": (noisy_ghz, 1),
}


def make_family(name: str, params: Sequence[float] = ()) -> np.ndarray:
    """Build a named state family, e.g. make_family('chi', (5, 4, 3, 0))."""
    if name not in _FAMILIES:
        raise ValueError(f"unknown family {name!r}; known: {sorted(_FAMILIES)}")
    ctor, nargs = _FAMILIES[name]
    if len(params) != nargs:
        raise ValueError(f"family {name!r} takes {nargs} parameters, got {len(params)}")
    return ctor(*params)


def parse_state_spec(spec: str) -> np.ndarray:
    """Parse 'family:param,param,...' into a density operator."""
    name, _, rest = spec.partition(":")
    params = [float(tok) for tok in rest.split(",") if tok != ""] if rest else []
    return make_family(name.strip(), params)


def check_constructed_state(rho: np.ndarray) -> None:
    """Assert unit trace and positivity at the central tolerances."""
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise AssertionError("trace deviates from 1")
    if hermitian_eig(rho).values[0] < -tol.PSD:
        raise AssertionError("state has a negative eigenvalue")


def local_unitary_invariance_defect(rho: np.ndarray, unitaries: Sequence[np.ndarray]) -> float:
    """Max Frobenius deviation of rho under U (x) U (x) U conjugations."""
    worst = 0.0
    for u in unitaries:
        big = kron_all(u, u, u)
        worst = max(worst, float(np.linalg.norm(big @ rho @ big.conj().T - rho)))
    return worst
