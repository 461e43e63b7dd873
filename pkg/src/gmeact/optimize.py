"""Optimization routines: witness LPs over partial-transpose cones, the
product-vector seesaw, robustness and fidelity quantifiers, the grid
classification pipeline, and the incompressibility pipeline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from .linalg import (
    PartyStructure,
    hermitian_eig,
    kron_all,
    partial_transpose,
    permute_qubits,
    tensor_copies,
)
from .lp import LinearProgram, lp_solve
from .maps import ProjectionSet, projection_to_vector, vector_to_projection
from .states import (
    GhzDiagCoeffs,
    XState,
    ghz_basis_matrix,
    ghz_witness,
    ghz_witness_weights,
    make_chi,
    mix_white_noise,
)
from .criteria import hadamard_2copy_criterion


class PtClosureError(ValueError):
    """The basis span is not closed under the requested partial transpose."""


@dataclass(frozen=True)
class CoeffPtMap:
    """Action of a partial transpose on basis-projector coefficient vectors."""

    matrix: np.ndarray
    parties: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        k = m.shape[0]
        if np.max(np.abs(m @ m - np.eye(k))) > 1e-9:
            raise PtClosureError("coefficient map is not an involution")
        if np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-9:
            raise PtClosureError("coefficient map does not preserve the trace")


def coeff_pt_map(basis_vectors: np.ndarray, ps: PartyStructure, parties) -> CoeffPtMap:
    """Coefficient-space matrix of T_X on a basis of orthonormal projectors.

    ``basis_vectors`` holds the projector eigenvectors as columns.  Raises
    when a transposed projector leaves the span (residual above 1e-9).
    """
    v = np.asarray(basis_vectors)
    d, n = v.shape
    parties = tuple(parties)
    m = np.empty((n, n))
    for j in range(n):
        pt = partial_transpose(np.outer(v[:, j], v[:, j].conj()), ps, parties)
        coeff = np.einsum("ui,uv,vi->i", v.conj(), pt, v)
        if np.max(np.abs(coeff.imag)) > 1e-12:
            raise PtClosureError("complex coefficient in a Hermitian expansion")
        c = coeff.real
        # Parseval residual: transposition permutes entries, so |PT|_F = 1
        resid_sq = 1.0 - float(c @ c)
        if resid_sq > 1e-9:
            raise PtClosureError(
                f"projector {j} leaves the span, residual^2 = {resid_sq:.3e}"
            )
        m[:, j] = c
    return CoeffPtMap(matrix=m, parties=parties)


_CACHE: dict = {}


def single_copy_pt_maps() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """GHZ-basis coefficient maps of T_A, T_B, T_C on one three-qubit copy."""
    if "single" not in _CACHE:
        basis = ghz_basis_matrix()
        ps = PartyStructure((2, 2, 2))
        _CACHE["single"] = tuple(
            coeff_pt_map(basis, ps, (x,)).matrix for x in range(3)
        )
    return _CACHE["single"]


def product_pt_maps(copies: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient maps on the product GHZ basis of ``copies`` factors.

    A partial transpose acts factor-wise on product projectors, so the
    multi-copy map is the Kronecker power of the single-copy map.
    """
    key = ("product", copies)
    if key not in _CACHE:
        maps = []
        for m in single_copy_pt_maps():
            big = m
            for _ in range(copies - 1):
                big = np.kron(big, m)
            maps.append(big)
        _CACHE[key] = tuple(maps)
    return _CACHE[key]


# ---------------------------------------------------------------------------
# PPT-mixture witness LP

@dataclass
class PptMixResult:
    """Optimal graph-diagonal witness over the PPT-mixture cone."""

    value: float
    witness_weights: np.ndarray
    components: dict[int, tuple[np.ndarray, np.ndarray]]
    iterations: int

    @property
    def detected(self) -> bool:
        return self.value < -tol.DETECT


def pptmix_lp(coeffs: np.ndarray, pt_maps) -> PptMixResult:
    """Minimal witness expectation over diagonal PPT-mixture witnesses.

    ``coeffs`` are the state's weights in an orthonormal projector basis and
    ``pt_maps`` the coefficient maps of the bipartite partial transposes.
    A negative optimum certifies that the state is not a PPT mixture.
    """
    r = np.asarray(coeffs, dtype=float)
    k = r.size
    if abs(r.sum() - 1.0) > 1e-8:
        raise ValueError("state coefficients must sum to 1")
    maps = [np.asarray(m) for m in pt_maps]
    n_parts = len(maps)
    nvar = 2 * n_parts * k

    ones = np.ones(k)
    a_rows = []
    for x in range(1, n_parts):
        row = np.zeros((k, nvar))
        row[:, 0:k] = np.eye(k)
        row[:, k : 2 * k] = maps[0]
        row[:, 2 * x * k : (2 * x + 1) * k] = -np.eye(k)
        row[:, (2 * x + 1) * k : (2 * x + 2) * k] = -maps[x]
        a_rows.append(row)
    norm_row = np.zeros((1, nvar))
    norm_row[0, 0:k] = ones
    norm_row[0, k : 2 * k] = ones @ maps[0]
    a_rows.append(norm_row)
    a_eq = np.vstack(a_rows)
    b_eq = np.zeros(a_eq.shape[0])
    b_eq[-1] = 1.0

    c = np.zeros(nvar)
    c[0:k] = r
    c[k : 2 * k] = maps[0].T @ r

    sol = lp_solve(LinearProgram(c, a_eq, b_eq))
    comps = {}
    for x in range(n_parts):
        p = sol.x[2 * x * k : (2 * x + 1) * k]
        q = sol.x[(2 * x + 1) * k : (2 * x + 2) * k]
        comps[x] = (p, q)
    w = comps[0][0] + maps[0] @ comps[0][1]
    return PptMixResult(
        value=sol.value, witness_weights=w, components=comps, iterations=sol.iterations
    )


def verify_pptmix_certificate(coeffs, witness_weights, components, pt_maps, value) -> bool:
    """Re-check a stored witness decomposition without running the solver."""
    w = np.asarray(witness_weights)
    if abs(w.sum() - 1.0) > 1e-7:
        return False
    for x, m in enumerate(np.asarray(mm) for mm in pt_maps):
        p, q = components[x]
        p = np.asarray(p)
        q = np.asarray(q)
        if p.min() < -1e-8 or q.min() < -1e-8:
            return False
        if np.max(np.abs(p + m @ q - w)) > 1e-7:
            return False
    return abs(float(np.asarray(coeffs) @ w) - value) < 1e-7


def two_copy_pptmix(weights: np.ndarray) -> PptMixResult:
    """PPT-mixture LP for two copies of a GHZ-diagonal state."""
    r = np.asarray(weights, dtype=float)
    return pptmix_lp(np.kron(r, r), product_pt_maps(2))


def white_noise_robustness(t: float, dim: int) -> float:
    """Noise weight where the witness expectation of state + noise hits zero."""
    if t > 0:
        raise ValueError("state not detected (t > 0); robustness undefined")
    return 1.0 / (1.0 - dim * t)


# ---------------------------------------------------------------------------
# seesaw over product vectors

@dataclass
class SeesawResult:
    vectors: tuple[np.ndarray, ...]
    value: float
    iterations: int
    start_index: int
    trajectory: list[float] = field(repr=False, default_factory=list)

    @property
    def detected(self) -> bool:
        return self.value < -tol.DETECT

    def projections(self) -> ProjectionSet:
        return ProjectionSet(tuple(vector_to_projection(v) for v in self.vectors))


def build_seesaw_operator(rho2: np.ndarray, witness: np.ndarray) -> np.ndarray:
    """(two-copy state) (x) (witness), reordered so each party holds its two
    copy qubits plus its witness qubit contiguously."""
    if rho2.shape != (64, 64) or witness.shape != (8, 8):
        raise ValueError("expected a 64x64 two-copy state and an 8x8 witness")
    full = np.kron(rho2, witness)
    return permute_qubits(full, [0, 1, 6, 2, 3, 7, 4, 5, 8])


def _effective_operator(tensor, vecs, party):
    n = len(vecs)
    args = []
    for i, v in enumerate(vecs):
        if i != party:
            args.extend([v.conj(), [i]])
    args.extend([tensor, list(range(2 * n))])
    for i, v in enumerate(vecs):
        if i != party:
            args.extend([v, [n + i]])
    args.append([party, n + party])
    return np.einsum(*args, optimize=True)


def _direct_value(tensor, vecs):
    n = len(vecs)
    args = []
    for i, v in enumerate(vecs):
        args.extend([v.conj(), [i]])
    args.extend([tensor, list(range(2 * n))])
    for i, v in enumerate(vecs):
        args.extend([v, [n + i]])
    return float(np.real(np.einsum(*args, optimize=True)))


def seesaw(
    x_op: np.ndarray,
    dims: tuple[int, ...] = (8, 8, 8),
    starts: int = 10,
    iters: int = 30,
    seed: int = 0,
    warm_starts: tuple = (),
    conv_tol: float = 1e-12,
) -> SeesawResult:
    """Minimize the product-vector expectation value of a Hermitian operator.

    Alternates minimal-eigenvector updates over the parties; the value never
    increases within a run.  Returns the best run over all starting points
    (warm starts first, then ``starts`` random ones).
    """
    n = len(dims)
    tensor = x_op.reshape(*dims, *dims)
    rng = np.random.default_rng(seed)

    def random_triple():
        out = []
        for d in dims:
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            out.append(v / np.linalg.norm(v))
        return tuple(out)

    initials = [tuple(np.asarray(v, dtype=complex) for v in w) for w in warm_starts]
    initials += [random_triple() for _ in range(starts)]

    best = None
    for idx, init in enumerate(initials):
        vecs = [v / np.linalg.norm(v) for v in init]
        value = _direct_value(tensor, vecs)
        trajectory = [value]
        used = 0
        for _ in range(iters):
            used += 1
            for party in range(n):
                m = _effective_operator(tensor, vecs, party)
                m = (m + m.conj().T) / 2
                w, v = hermitian_eig(m)
                vecs[party] = v[:, 0]
                new_value = float(w[0])
                if new_value > value + 1e-9:
                    raise AssertionError("seesaw value increased")
                value = new_value
            trajectory.append(value)
            if len(trajectory) > 1 and abs(trajectory[-2] - trajectory[-1]) < conv_tol:
                break
        final = _direct_value(tensor, vecs)
        if best is None or final < best.value:
            best = SeesawResult(
                vectors=tuple(vecs),
                value=final,
                iterations=used,
                start_index=idx,
                trajectory=trajectory,
            )
    return best


def projection_witness_value(rho2: np.ndarray, pset: ProjectionSet, kappa: float = 0.5) -> float:
    """Witness expectation of the unnormalized projected two-copy state.

    Negative values certify detectable activation; the quantity is what the
    seesaw minimizes, up to the positive rescaling of the stored matrices.
    """
    big = kron_all(*pset.mats)
    raw = big @ rho2 @ big.conj().T
    return float(np.real(np.trace(ghz_witness(kappa) @ raw)))


# ---------------------------------------------------------------------------
# PPT relaxation over the diagonal simplex

@dataclass
class PptRelaxResult:
    """Lower bound on the product-vector minimum over diagonal PPT states."""

    value: float
    state_weights: np.ndarray
    bound_multipliers: np.ndarray
    iterations: int

    @property
    def rules_out_projections(self) -> bool:
        return self.value >= -tol.DETECT


def ppt_relax_lp(rho_weights: np.ndarray, witness_weights: np.ndarray) -> PptRelaxResult:
    """Minimize the expectation of (rho (x) rho (x) witness) over states that
    are diagonal in the triple product GHZ basis and PPT for each bipartition.

    A nonnegative optimum certifies that no local projections can reveal the
    two-copy state to the given witness.  Solved in the bound form (multiplier
    variables for the positivity constraints), which keeps the tableau at
    512 rows; the minimizing state is read off the equality multipliers.
    """
    r = np.asarray(rho_weights, dtype=float)
    w = np.asarray(witness_weights, dtype=float)
    if r.shape != (8,) or w.shape != (8,):
        raise ValueError("expected 8 GHZ weights for the state and the witness")
    if abs(r.sum() - 1.0) > 1e-8:
        raise ValueError("state weights must sum to 1")
    x = np.kron(np.kron(r, r), w)
    k = x.size
    maps = product_pt_maps(3)

    # maximize t subject to t*1 + sum_X M_X^T y_X <= x, y_X >= 0:
    # any feasible (t, y) bounds the constrained minimum from below by t.
    nvar = 2 + 3 * k + k
    a_eq = np.empty((k, nvar))
    a_eq[:, 0] = 1.0
    a_eq[:, 1] = -1.0
    for i, m in enumerate(maps):
        a_eq[:, 2 + i * k : 2 + (i + 1) * k] = m.T
    a_eq[:, 2 + 3 * k :] = np.eye(k)
    c = np.zeros(nvar)
    c[0] = -1.0
    c[1] = 1.0

    sol = lp_solve(LinearProgram(c, a_eq, x))
    value = -sol.value
    s = -sol.duals
    y = sol.x[2 : 2 + 3 * k]
    # independent check of the recovered minimizer
    if s.min() < -1e-8 or abs(s.sum() - 1.0) > 1e-7:
        raise AssertionError("recovered state weights are not a distribution")
    for m in maps:
        if (m @ s).min() < -1e-7:
            raise AssertionError("recovered state violates a positivity constraint")
    if abs(float(x @ s) - value) > 1e-7:
        raise AssertionError("primal-dual objective mismatch in the relaxation")
    return PptRelaxResult(
        value=value, state_weights=s, bound_multipliers=y, iterations=sol.iterations
    )


# ---------------------------------------------------------------------------
# fidelity bound via bisection over witness offsets

@dataclass
class FidelityBoundResult:
    kappa: float
    projections: ProjectionSet | None
    seesaw_value: float


def _hadamard_warm_start():
    from .maps import hadamard_projection_set, d_projections

    triples = []
    for pset in (hadamard_projection_set(2), d_projections()):
        triples.append(tuple(projection_to_vector(f) for f in pset.mats))
    return triples


def fidelity_bound(
    rho2: np.ndarray,
    starts: int = 10,
    iters: int = 30,
    seed: int = 0,
    steps: int = 20,
    warm: bool = True,
) -> FidelityBoundResult:
    """Lower bound on the best post-projection GHZ fidelity of a two-copy state.

    Bisects the witness offset on [0.5, 1]; each probe runs a seesaw that
    must certify a negative expectation value.  Returns 0 when even the
    standard fidelity witness detects nothing.
    """
    warm_list = _hadamard_warm_start() if warm else []

    def probe(kappa):
        x = build_seesaw_operator(rho2, ghz_witness(kappa))
        res = seesaw(
            x, starts=starts, iters=iters, seed=seed, warm_starts=tuple(warm_list)
        )
        return res

    res = probe(0.5)
    if res.value >= -1e-11:
        return FidelityBoundResult(kappa=0.0, projections=None, seesaw_value=res.value)
    lo, hi = 0.5, 1.0
    best = res
    for _ in range(steps):
        mid = (lo + hi) / 2
        res = probe(mid)
        if res.value < -1e-11:
            lo = mid
            best = res
            warm_list.append(best.vectors)
        else:
            hi = mid
    return FidelityBoundResult(kappa=lo, projections=best.projections(), seesaw_value=best.value)


# ---------------------------------------------------------------------------
# grid classification pipeline

class ClassificationLabel(enum.Enum):
    PARTITION_SEPARABLE = "PartitionSeparable"
    NOT_DETECTED_GME = "NotDetectedGME"
    HADAMARD_DETECTED = "HadamardDetected"
    PROJECTION_FOUND = "ProjectionFound"
    NO_PROJECTION_EXISTS = "NoProjectionExists"
    UNDECIDED = "Undecided"


ALL_STAGES = ("partition", "pptmix", "hadamard", "seesaw", "relax")


@dataclass
class PointResult:
    lams: tuple[float, float, float, float]
    noise: float
    label: ClassificationLabel
    t: float | None = None
    p_wnr: float | None = None
    hadamard: bool | None = None
    seesaw_value: float | None = None
    relax_value: float | None = None
    fidelity: float | None = None
    witness_weights: np.ndarray | None = field(repr=False, default=None)
    witness_components: dict | None = field(repr=False, default=None)
    projections: ProjectionSet | None = field(repr=False, default=None)


def noisy_chi_weights(lams, noise: float) -> np.ndarray:
    """GHZ weights of chi(lams) mixed with white noise of weight 1 - noise."""
    base = XState(tuple(lams), tuple(lams)).ghz_weights().weights
    return noise * base + (1 - noise) / 8


def classify_point(
    lams,
    noise: float = 1.0,
    stages=ALL_STAGES,
    seed: int = 0,
    seesaw_starts: int = 10,
    seesaw_iters: int = 30,
) -> PointResult:
    """Run the staged detection pipeline for a noisy chi state.

    The first conclusive stage fixes the label; later stages are skipped.
    """
    lams = tuple(float(v) for v in lams)
    result = PointResult(lams=lams, noise=noise, label=ClassificationLabel.UNDECIDED)

    if "partition" in stages:
        if abs(lams[0] - lams[1]) <= 1e-12 and abs(lams[2] - lams[3]) <= 1e-12:
            result.label = ClassificationLabel.PARTITION_SEPARABLE
            return result

    r = noisy_chi_weights(lams, noise)

    if "pptmix" in stages:
        mix = two_copy_pptmix(r)
        result.t = mix.value
        result.witness_weights = mix.witness_weights
        result.witness_components = mix.components
        if not mix.detected:
            result.label = ClassificationLabel.NOT_DETECTED_GME
            return result
        result.p_wnr = white_noise_robustness(min(mix.value, 0.0), 64)

    lam_entries = (r[0::2] + r[1::2]) / 2
    mu_entries = (r[0::2] - r[1::2]) / 2
    if "hadamard" in stages:
        result.hadamard = hadamard_2copy_criterion(lam_entries, mu_entries)
        if result.hadamard:
            result.label = ClassificationLabel.HADAMARD_DETECTED
            return result

    if "seesaw" in stages:
        rho = mix_white_noise(make_chi(*lams), noise)
        x = build_seesaw_operator(tensor_copies(rho, 2), ghz_witness())
        res = seesaw(x, starts=seesaw_starts, iters=seesaw_iters, seed=seed)
        result.seesaw_value = res.value
        if res.detected:
            result.label = ClassificationLabel.PROJECTION_FOUND
            result.projections = res.projections()
            return result

    if "relax" in stages:
        rel = ppt_relax_lp(r, ghz_witness_weights())
        result.relax_value = rel.value
        if rel.rules_out_projections:
            result.label = ClassificationLabel.NO_PROJECTION_EXISTS
            return result

    result.label = ClassificationLabel.UNDECIDED
    return result


def chi_grid(step: float = 0.05):
    """Lattice of biseparable chi(1, x, y, z) points: 1 >= x >= y >= z >= 0
    with x + y + z >= 1."""
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise ValueError("step must divide 1")
    points = []
    for i in range(n, -1, -1):
        for j in range(i, -1, -1):
            for k_ in range(j, -1, -1):
                if i + j + k_ >= n:
                    points.append((i * step, j * step, k_ * step))
    return points


# ---------------------------------------------------------------------------
# incompressibility pipeline

ICE_REFERENCE_WINDOWS = {
    ("rho_s", 0): {"two_copy_gme_from": 0.781, "projected_pptmix_until": 0.800},
    ("rho_u", 0): {"two_copy_gme_from": 0.708, "projected_pptmix_until": 0.738},
    ("rho_u", 1): {"two_copy_gme_from": 0.708, "projected_pptmix_until": 0.721},
}


def keep_subspace_projector(u: np.ndarray | None = None) -> np.ndarray:
    """Rank-3 projector removing one product vector from a two-qubit space."""
    v0 = np.array([1, 0], dtype=complex) if u is None else u @ np.array([1, 0], dtype=complex)
    vv = np.kron(v0, v0)
    return np.eye(4, dtype=complex) - np.outer(vv, vv.conj())


def projected_two_copy(rho: np.ndarray, party: int, u: np.ndarray | None = None) -> np.ndarray:
    """Normalized two-copy state after removing one local product vector."""
    t = tensor_copies(rho, 2)
    ops = [np.eye(4, dtype=complex)] * 3
    ops[party] = keep_subspace_projector(u)
    kk = kron_all(*ops)
    raw = kk @ t @ kk.conj().T
    norm = float(np.trace(raw).real)
    if norm <= tol.ZERO_NORM:
        raise ValueError("projection annihilated the state")
    return raw / norm


def pt_min_eigs(op: np.ndarray, dims=(4, 4, 4)) -> np.ndarray:
    """Minimal eigenvalue of the partial transpose per bipartition."""
    ps = PartyStructure(tuple(dims))
    return np.array(
        [hermitian_eig(partial_transpose(op, ps, (x,))).values[0] for x in range(len(dims))]
    )


@dataclass
class IcePoint:
    p: float
    min_pt: np.ndarray
    min_pt_projected: np.ndarray


@dataclass
class IceReport:
    family: str
    party: int
    points: list[IcePoint]
    npt_thresholds: np.ndarray
    npt_thresholds_projected: np.ndarray
    annotations: dict


def _npt_threshold(family_ctor, party, bipartition, projected, lo=0.0, hi=1.0, refine=1e-4):
    """Smallest p with a negative partial-transpose eigenvalue (bisection)."""

    def neg(p):
        rho = family_ctor(p)
        op = projected_two_copy(rho, party) if projected else tensor_copies(rho, 2)
        return pt_min_eigs(op)[bipartition] < -tol.PSD

    if neg(lo):
        return lo
    if not neg(hi):
        return float("nan")
    while hi - lo > refine:
        mid = (lo + hi) / 2
        if neg(mid):
            hi = mid
        else:
            lo = mid
    return hi


def ice_pipeline(family: str, p_values, party: int = 0) -> IceReport:
    """Per-noise NPT report for a two-copy incompressibility candidate.

    For each p the minimal partial-transpose eigenvalue of the two-copy state
    is listed per bipartition, before and after the local rank-3 projection.
    The reference windows from the convex-programming analysis are attached
    as annotations only; they are not recomputed here.
    """
    from .states import rho_ice_symmetric, rho_ice_asymmetric

    ctor = {"rho_s": rho_ice_symmetric, "rho_u": rho_ice_asymmetric}[family]
    points = []
    for p in p_values:
        rho = ctor(p)
        before = pt_min_eigs(tensor_copies(rho, 2))
        after = pt_min_eigs(projected_two_copy(rho, party))
        points.append(IcePoint(p=float(p), min_pt=before, min_pt_projected=after))
    thresholds = np.array([_npt_threshold(ctor, party, b, False) for b in range(3)])
    thresholds_proj = np.array([_npt_threshold(ctor, party, b, True) for b in range(3)])
    return IceReport(
        family=family,
        party=party,
        points=points,
        npt_thresholds=thresholds,
        npt_thresholds_projected=thresholds_proj,
        annotations=ICE_REFERENCE_WINDOWS.get((family, party), {}),
    )
