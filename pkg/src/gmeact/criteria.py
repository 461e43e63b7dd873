"""Closed-form activation criteria: the two-copy compression test for X
states, the distillation-style criterion, the permutation-operator
inequality in single-copy / k-copy / GHZ-diagonal form, and the detection
boundaries of the two noisy two-weight families.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import PAULI_X, PAULI_Y, kron_all


# Strict inequalities carry a relative guard so that states exactly on a
# detection boundary (their margin is pure rounding noise) never fire.
_GUARD = 1e-12


def x_state_gme(lambdas, mus) -> bool:
    """Single-copy GME test for an X state: some antidiagonal entry beats
    the sum of the other diagonal pairs."""
    lam = np.asarray(lambdas, dtype=float)
    mu = np.asarray(mus, dtype=float)
    total = lam.sum()
    return bool(np.any(np.abs(mu) > (total - lam) * (1 + _GUARD)))


def hadamard_2copy_criterion(lambdas, mus) -> bool:
    """Two copies are GME when |mu_1|^2 exceeds the sum of the squared
    remaining diagonal pairs (scale invariant)."""
    lam = np.asarray(lambdas, dtype=float)
    mu = np.asarray(mus, dtype=float)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    mu = mu[order]
    rhs = lam[1] ** 2 + lam[2] ** 2 + lam[3] ** 2
    return bool(mu[0] ** 2 > rhs * (1 + _GUARD))


def distillation_criterion(mu: float, eps: float, delta: float) -> bool:
    """Two-copy GME test for chi(1, mu, eps, delta) via the fixed projection
    family: fires when the dominant projected weight exceeds one half."""
    if not (1 + 1e-12 >= mu >= eps >= delta >= 0):
        raise ValueError("need 1 >= mu >= eps >= delta >= 0")
    if eps + delta <= 0:
        raise ValueError("criterion undefined for eps = delta = 0")
    return eps * (1 + mu) / ((eps + delta) * (1 + mu + eps + delta)) > 0.5


# ---------------------------------------------------------------------------
# permutation-operator inequality

@dataclass(frozen=True)
class PermutationOperator:
    """Permutation of the 2N tensor factors of a doubled system."""

    qubit_order: tuple[int, ...]

    def matrix(self) -> np.ndarray:
        n = len(self.qubit_order)
        d = 2**n
        idx = np.arange(d)
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        out_idx = np.zeros(d, dtype=np.int64)
        for k, src in enumerate(self.qubit_order):
            out_idx |= bits[src] << (n - 1 - k)
        m = np.zeros((d, d))
        m[out_idx, idx] = 1.0
        return m


def copy_swap(n_parties: int, subset) -> PermutationOperator:
    """Swap the two copies of every party in ``subset`` (copy-major order)."""
    subset = set(subset)
    order = list(range(2 * n_parties))
    for x in subset:
        order[x], order[n_parties + x] = order[n_parties + x], order[x]
    return PermutationOperator(tuple(order))


def set_partitions(items: Sequence[int], m: int):
    """All partitions of ``items`` into exactly m nonempty unordered blocks."""
    items = list(items)
    if m == 1:
        yield [list(items)]
        return
    if len(items) < m:
        return
    first, rest = items[0], items[1:]
    # first element joins an existing block of a smaller partition, or opens
    # its own block alongside a partition of the rest into m-1 blocks
    for part in set_partitions(rest, m):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
    for part in set_partitions(rest, m - 1):
        yield [[first]] + part


def _product_vector(factors) -> np.ndarray:
    factors = [np.asarray(f, dtype=complex).ravel() for f in factors]
    for f in factors:
        if f.shape != (2,):
            raise ValueError("expected one single-qubit vector per tensor factor")
    return kron_all(*[f.reshape(2, 1) for f in factors]).ravel()


def _permuted(factors, perm: PermutationOperator):
    return [factors[src] for src in perm.qubit_order]


def ghh_single(rho: np.ndarray, phi, m: int = 2) -> tuple[float, float]:
    """Both sides of the permutation inequality bounding m-separable states.

    ``phi`` is a fully separable 2N-qubit vector given as its 2N single-qubit
    factors.  A violation (lhs > rhs) at m = 2 witnesses GME.
    """
    d = rho.shape[0]
    n = int(round(math.log2(d)))
    factors = list(phi)
    if len(factors) != 2 * n:
        raise ValueError(f"need {2 * n} single-qubit factors, got {len(factors)}")
    big = np.kron(rho, rho)
    phi_vec = _product_vector(factors)

    tot = copy_swap(n, range(n))
    v_tot = np.real(phi_vec.conj() @ big @ _product_vector(_permuted(factors, tot)))
    lhs = math.sqrt(max(v_tot, 0.0))

    rhs = 0.0
    for blocks in set_partitions(range(n), m):
        term = 1.0
        for block in blocks:
            moved = _product_vector(_permuted(factors, copy_swap(n, block)))
            val = float(np.real(moved.conj() @ big @ moved))
            term *= max(val, 0.0)
        rhs += term ** (1.0 / (2 * m))
    return lhs, rhs


def ghh_kcopy(rho: np.ndarray, k: int, phis) -> tuple[float, float]:
    """k-copy form of the permutation inequality: per-copy factors multiply.

    ``phis`` holds k fully separable 2N-qubit vectors (factor lists).
    A violation (lhs > rhs) certifies that k copies of rho are GME.
    """
    phis = list(phis)
    if len(phis) != k:
        raise ValueError(f"need {k} product vectors, got {len(phis)}")
    d = rho.shape[0]
    n = int(round(math.log2(d)))
    big = np.kron(rho, rho)
    tot = copy_swap(n, range(n))

    lhs = 1.0
    for phi in phis:
        factors = list(phi)
        vec = _product_vector(factors)
        v = np.real(vec.conj() @ big @ _product_vector(_permuted(factors, tot)))
        lhs *= math.sqrt(max(v, 0.0))

    rhs = 0.0
    for blocks in set_partitions(range(n), 2):
        term = 1.0
        for block in blocks:
            perm = copy_swap(n, block)
            for phi in phis:
                factors = list(phi)
                moved = _product_vector(_permuted(factors, perm))
                term *= max(float(np.real(moved.conj() @ big @ moved)), 0.0)
        rhs += term**0.25
    return lhs, rhs


def ghz_diag_test_vectors() -> list[list[np.ndarray]]:
    """The four computational product vectors used for GHZ-diagonal states."""
    e0 = np.array([1, 0], dtype=complex)
    e1 = np.array([0, 1], dtype=complex)
    strings = ["000111", "001110", "010101", "100011"]
    return [[e0 if ch == "0" else e1 for ch in s] for s in strings]


# ---------------------------------------------------------------------------
# GHZ-diagonal composition inequality

@dataclass(frozen=True)
class GhhGhzInput:
    """Weight differences and sums per GHZ pair, plus the copy count."""

    big_lambda: tuple[float, float, float, float]
    big_m: tuple[float, float, float, float]
    k: int

    def __post_init__(self):
        lam = tuple(float(v) for v in self.big_lambda)
        mm = tuple(float(v) for v in self.big_m)
        object.__setattr__(self, "big_lambda", lam)
        object.__setattr__(self, "big_m", mm)
        if any(l < -1e-12 or l > m + 1e-12 for l, m in zip(lam, mm)):
            raise ValueError("need 0 <= Lambda_m <= M_m")
        if abs(sum(mm) - 1.0) > 1e-9:
            raise ValueError("pair sums must add up to 1")
        if self.k < 1:
            raise ValueError("need k >= 1")

    @staticmethod
    def from_weights(weights, k: int) -> "GhhGhzInput":
        w = np.asarray(weights, dtype=float)
        plus, minus = w[0::2], w[1::2]
        return GhhGhzInput(tuple(np.abs(plus - minus)), tuple(plus + minus), k)


def compositions(k: int, parts: int = 4):
    """All tuples of ``parts`` nonnegative integers summing to k."""
    for cuts in itertools.combinations(range(k + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(k + parts - 2 - prev)
        yield tuple(out)


_RHS_EXPONENTS = (
    (3, 2, 1, 0),  # M4^k1 M3^k2 M2^k3 M1^k4
    (2, 3, 0, 1),  # M3^k1 M4^k2 M1^k3 M2^k4
    (1, 0, 3, 2),  # M2^k1 M1^k2 M4^k3 M3^k4
)


def _log(v: float) -> float:
    return math.log(v) if v > 0 else -math.inf


def ghh_ghz_diag(inp: GhhGhzInput) -> bool:
    """True when some composition of the k copies violates the inequality.

    Evaluated in the log domain so large copy counts cannot underflow.
    """
    log_lam = [_log(v) for v in inp.big_lambda]
    log_m = [_log(v) for v in inp.big_m]
    for ks in compositions(inp.k):
        lhs = sum(ki * ll for ki, ll in zip(ks, log_lam) if ki)
        if lhs == -math.inf:
            continue
        terms = []
        for pattern in _RHS_EXPONENTS:
            t = sum(ki * log_m[pattern[i]] for i, ki in enumerate(ks) if ki)
            terms.append(t)
        top = max(terms)
        if top == -math.inf:
            return True  # positive lhs against a vanishing rhs
        rhs = top + math.log(sum(math.exp(t - top) for t in terms))
        if lhs > rhs:
            return True
    return False


# ---------------------------------------------------------------------------
# closed-form boundaries for the two-weight noisy families

def rho1_detect(p_plus1: float, p_minus1: float, k: int) -> bool:
    """k-copy detection of the (+1, -1)-weight family with white noise."""
    _check_pair(p_plus1, p_minus1)
    q = (1 - p_plus1 - p_minus1) / 4
    return abs(p_plus1 - p_minus1) > 3 ** (1.0 / k) * q


def rho1_boundary(k: int, p_minus1: float = 0.0) -> float:
    """Detection boundary value of p_plus1 at the given p_minus1."""
    t = 3 ** (1.0 / k)
    return t / (4 + t) + (4 - t) / (4 + t) * p_minus1


def rho1_limit_line() -> tuple[Fraction, Fraction]:
    """Infinite-copy boundary p_plus1 = 1/5 + (3/5) p_minus1, exact."""
    return Fraction(1, 5), Fraction(3, 5)


def rho2_detect(p_plus1: float, p_plus2: float, k: int) -> bool:
    """k-copy detection of the (+1, +2)-weight family with white noise."""
    _check_pair(p_plus1, p_plus2)
    mu = (1 - p_plus1 - p_plus2) / 4
    a = p_plus1
    if a <= 0:
        return False
    rb = (mu + p_plus2) / a
    rc = mu / a
    return 1.0 > rb**k + 2 * rc**k


def rho2_limit_line() -> tuple[Fraction, Fraction]:
    """Infinite-copy boundary 5 p_plus1 = 1 + 3 p_plus2, as intercept/slope."""
    return Fraction(1, 5), Fraction(3, 5)


def _check_pair(first: float, second: float) -> None:
    if first < 0 or second < 0 or first + second > 1 + 1e-12:
        raise ValueError("invalid probability parameters")
    if first < second:
        raise ValueError("expected the first weight to dominate")


# ---------------------------------------------------------------------------
# measurement decomposition of the corner operator

def m_l_observable(l: int, n: int) -> np.ndarray:
    """Equatorial +-1 observable cos(l pi/n) X + sin(l pi/n) Y."""
    if not 1 <= l <= n:
        raise ValueError(f"l must lie in 1..{n}")
    ang = l * math.pi / n
    return math.cos(ang) * PAULI_X + math.sin(ang) * PAULI_Y


def corner_operator(n: int) -> np.ndarray:
    """|0...0><1...1| + |1...1><0...0| on n qubits."""
    d = 2**n
    out = np.zeros((d, d), dtype=complex)
    out[0, d - 1] = 1.0
    out[d - 1, 0] = 1.0
    return out


def lifted_witness_value(rho: np.ndarray, k: int, n_parties: int | None = None) -> float:
    """Fidelity witness lifted to k copies, as single-copy moments:

    half the k-th powers of the non-extremal diagonal entries, minus the
    alternating sum of k-th powers of the equatorial correlations.
    """
    d = rho.shape[0]
    n_par = n_parties or int(round(math.log2(d)))
    if 2**n_par != d:
        raise ValueError("state dimension does not match the party count")
    diag = np.real(np.diag(rho))
    diag_term = float(sum(diag[1 : d - 1] ** k)) / 2
    n = n_par * k
    corr_term = 0.0
    for l in range(1, n + 1):
        obs = kron_all(*([m_l_observable(l, n)] * n_par))
        corr_term += (-1) ** l * float(np.real(np.trace(obs @ rho))) ** k
    return diag_term - corr_term / (2 * n)
