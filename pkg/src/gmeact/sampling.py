"""Shot-noise model for the nonlinear multi-copy witness.

Simulates local product measurements (the computational setting plus the
equatorial settings), forms plug-in estimates of the lifted witness from
the counts, and reports replication statistics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .criteria import m_l_observable
from .linalg import PAULI_Z, hermitian_eig


class MissingSettingError(KeyError):
    pass


@dataclass(frozen=True)
class MeasurementSetting:
    """A product of identical single-qubit +-1 observables on every party."""

    label: str
    observable: np.ndarray  # 2x2, eigenvalues exactly +-1
    parties: int
    angle: float | None = None  # equatorial angle, None for the Z setting

    def __post_init__(self):
        w = np.linalg.eigvalsh(self.observable)
        if abs(w[0] + 1) > 1e-10 or abs(w[1] - 1) > 1e-10:
            raise ValueError("setting observables must have a +-1 spectrum")


def z_setting(parties: int = 3) -> MeasurementSetting:
    return MeasurementSetting("Z", PAULI_Z.copy(), parties, angle=None)


def equatorial_setting(l: int, n: int, parties: int = 3) -> MeasurementSetting:
    return MeasurementSetting(f"M{l}", m_l_observable(l, n), parties, angle=l * math.pi / n)


def witness_settings(k: int, parties: int = 3) -> list[MeasurementSetting]:
    """The 1 + N*k settings needed for the k-copy lifted witness."""
    n = parties * k
    return [z_setting(parties)] + [equatorial_setting(l, n, parties) for l in range(1, n + 1)]


def outcome_probs(rho: np.ndarray, setting: MeasurementSetting) -> np.ndarray:
    """Born probabilities of the 2^N joint outcome strings (0 means +1)."""
    n = setting.parties
    if rho.shape != (2**n, 2**n):
        raise ValueError(f"state dimension {rho.shape} does not match {n} parties")
    w, v = hermitian_eig(setting.observable)
    # ascending eigenvalues: column 0 <-> -1, column 1 <-> +1
    plus, minus = v[:, 1], v[:, 0]
    probs = np.empty(2**n)
    for outcome in range(2**n):
        vecs = [
            minus if (outcome >> (n - 1 - q)) & 1 else plus for q in range(n)
        ]
        joint = vecs[0]
        for vq in vecs[1:]:
            joint = np.kron(joint, vq)
        probs[outcome] = max(float(np.real(joint.conj() @ rho @ joint)), 0.0)
    return probs / probs.sum()


@dataclass(frozen=True)
class ShotCounts:
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", c)
        if c.min() < 0 or c.sum() != self.shots:
            raise ValueError("counts must be nonnegative and sum to shots")

    def frequencies(self) -> np.ndarray:
        if self.shots == 0:
            return np.zeros_like(self.counts, dtype=float)
        return self.counts / self.shots


def sample_counts(probs: np.ndarray, shots: int, rng: np.random.Generator) -> ShotCounts:
    probs = np.asarray(probs, dtype=float)
    if abs(probs.sum() - 1.0) > 1e-9 or probs.min() < -1e-12:
        raise ValueError("not a probability distribution")
    if shots == 0:
        return ShotCounts(np.zeros(probs.size, dtype=np.int64), 0)
    return ShotCounts(rng.multinomial(shots, probs / probs.sum()), shots)


def _parity_signs(n_outcomes: int, parties: int) -> np.ndarray:
    idx = np.arange(n_outcomes)
    bits = np.zeros(n_outcomes, dtype=np.int64)
    for q in range(parties):
        bits += (idx >> q) & 1
    return np.where(bits % 2, -1.0, 1.0)


def _correlation(counts: ShotCounts, parties: int) -> float:
    return float(_parity_signs(counts.counts.size, parties) @ counts.frequencies())


def _moment(value: float, k: int, counts: ShotCounts | None, debias: bool, parties: int) -> float:
    if not debias or counts is None or k == 1:
        return value**k
    if k != 2:
        raise ValueError("the debiased estimator is implemented for k = 2 only")
    n = counts.shots
    if n < 2:
        return value**2
    s = value * n
    return (s * s - n) / (n * (n - 1))


def _diag_moment(freq: float, k: int, shots: int, debias: bool) -> float:
    if not debias or k == 1:
        return freq**k
    if k != 2:
        raise ValueError("the debiased estimator is implemented for k = 2 only")
    if shots < 2:
        return freq**2
    c = freq * shots
    return c * (c - 1) / (shots * (shots - 1))


def estimate_witness(
    data: list[tuple[MeasurementSetting, ShotCounts]],
    k: int,
    parties: int = 3,
    debias: bool = False,
) -> float:
    """Plug-in estimate of the k-copy lifted witness from measured counts.

    Needs the computational setting plus equatorial settings at the angles
    l*pi/(N*k); data taken for a larger copy number can be reused whenever
    the required angles appear in it.
    """
    n = parties * k
    z_counts = None
    by_angle: dict[float, float] = {}
    angle_counts: dict[float, ShotCounts] = {}
    for setting, counts in data:
        if setting.angle is None:
            z_counts = counts
        else:
            by_angle[setting.angle] = _correlation(counts, parties)
            angle_counts[setting.angle] = counts
    if z_counts is None:
        raise MissingSettingError("computational (Z) setting missing")

    freqs = z_counts.frequencies()
    d = freqs.size
    diag_term = sum(
        _diag_moment(float(freqs[s]), k, z_counts.shots, debias) for s in range(1, d - 1)
    ) / 2

    corr_term = 0.0
    for l in range(1, n + 1):
        target = l * math.pi / n
        found = None
        for angle, value in by_angle.items():
            if abs(angle - target) < 1e-9:
                found = (value, angle_counts[angle])
                break
        if found is None:
            raise MissingSettingError(f"no equatorial setting at angle {target:.6f}")
        corr_term += (-1) ** l * _moment(found[0], k, found[1], debias, parties)
    return diag_term - corr_term / (2 * n)


@dataclass
class ReplicationReport:
    values: np.ndarray
    shots: int
    replications: int
    seed: int
    mean: float
    std: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "shots": self.shots,
                "replications": self.replications,
                "seed": self.seed,
                "mean": self.mean,
                "std": self.std,
                "values": [float(v) for v in self.values],
            }
        )

    def histogram_csv(self) -> str:
        """Freedman-Diaconis-binned histogram of the replication values."""
        vals = np.sort(self.values)
        q75, q25 = np.percentile(vals, [75, 25])
        width = 2 * (q75 - q25) / len(vals) ** (1 / 3)
        if width <= 0:
            width = max(1e-12, (vals[-1] - vals[0]) or 1e-12)
        nbins = max(1, int(math.ceil((vals[-1] - vals[0]) / width)))
        hist, edges = np.histogram(vals, bins=nbins)
        lines = ["bin_left,bin_right,count"]
        for i, h in enumerate(hist):
            lines.append(f"{edges[i]:.9g},{edges[i + 1]:.9g},{int(h)}")
        return "\n".join(lines) + "\n"


def replicate(
    rho: np.ndarray,
    k: int,
    shots: int,
    reps: int,
    seed: int = 0,
    parties: int = 3,
    debias: bool = False,
    estimate_k: int | None = None,
) -> ReplicationReport:
    """Repeat the full measurement simulation and report estimator statistics.

    ``estimate_k`` allows evaluating a lower-copy witness (for instance the
    plain single-copy one) from the same simulated data.
    """
    if reps < 2:
        raise ValueError("need at least 2 replications")
    settings = witness_settings(k, parties)
    prob_table = [(s, outcome_probs(rho, s)) for s in settings]
    k_eval = estimate_k or k
    values = np.empty(reps)
    for rep in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))
        data = [(s, sample_counts(p, shots, rng)) for s, p in prob_table]
        values[rep] = estimate_witness(data, k_eval, parties, debias=debias)
    return ReplicationReport(
        values=values,
        shots=shots,
        replications=reps,
        seed=seed,
        mean=float(values.mean()),
        std=float(values.std(ddof=1)),
    )
