"""Command-line entry point: named scans reproducing the figure/table-scale
experiments, with certificate serialization and independent re-validation.

Exit codes: 0 success, 2 invalid configuration, 3 internal invariant
violation (failed certification or consistency check).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .graphs import fuse_two_copies_state, graph_state, read_edge_list, to_dot, two_color_fuse
from .lp import LpCertificationError
from .maps import ProjectionSet
from .optimize import (
    ALL_STAGES,
    PtClosureError,
    build_seesaw_operator,
    chi_grid,
    classify_point,
    fidelity_bound,
    ice_pipeline,
    product_pt_maps,
    projection_witness_value,
    seesaw,
    two_copy_pptmix,
    verify_pptmix_certificate,
    white_noise_robustness,
)
from .sampling import replicate
from .states import (
    ghz_symmetric_coords,
    ghz_weights_schur_power,
    ghz_witness,
    ghz_twirl,
    mix_white_noise,
    parse_state_spec,
)
from .linalg import tensor_copies


class ConfigError(ValueError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path: str, meta: dict, columns: list[str], rows) -> None:
    lines = ["# schema=1"]
    for key, val in meta.items():
        lines.append(f"# {key}={val}")
    lines.append(f"# timestamp={datetime.datetime.now().isoformat()}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)


def _default_workers() -> int:
    env = os.environ.get("GMEACT_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _sparse(vec, tol=1e-12) -> dict:
    return {str(i): float(f"{v:.12g}") for i, v in enumerate(np.asarray(vec)) if abs(v) > tol}


def _unsparse(d: dict, size: int) -> np.ndarray:
    out = np.zeros(size)
    for key, val in d.items():
        out[int(key)] = val
    return out


def _pptmix_certificate(lams, noise, value, witness_weights) -> dict:
    return {
        "kind": "pptmix",
        "state": {"family": "chi", "lams": list(lams), "noise": noise},
        "value": value,
        "witness_weights": _sparse(witness_weights),
        "dim": 64,
    }


def _projection_certificate(lams, noise, kappa, projections, value) -> dict:
    return {
        "kind": "projection",
        "state": {"family": "chi", "lams": list(lams), "noise": noise},
        "kappa": kappa,
        "value": value,
        "projections": json.loads(projections.to_json()),
    }


# ---------------------------------------------------------------------------
# scan-chi

def _scan_worker(task):
    (x, y, z), noise, seed, stages, starts, iters = task
    res = classify_point((1.0, x, y, z), noise, stages=stages, seed=seed,
                         seesaw_starts=starts, seesaw_iters=iters)
    return res


def run_scan_chi(args) -> int:
    stages = tuple(args.stages.split(",")) if args.stages else ALL_STAGES
    unknown = set(stages) - set(ALL_STAGES)
    if unknown:
        raise ConfigError(f"unknown stages: {sorted(unknown)}")
    noises = [float(tok) for tok in args.noise.split(",")]
    grid = sorted(chi_grid(args.step))
    tasks = []
    for idx, (x, y, z) in enumerate(grid):
        for noise in sorted(noises):
            tasks.append(((x, y, z), noise, args.seed + len(tasks), stages,
                          args.starts, args.iters))
    results = _parallel_map(_scan_worker, tasks, args.workers)

    columns = ["x", "y", "z", "p", "label", "t", "p_wnr", "fidelity_bound", "seesaw_C"]
    rows = []
    certs = []
    for res in results:
        _, x, y, z = res.lams
        rows.append((x, y, z, res.noise, res.label.value, res.t, res.p_wnr,
                     res.fidelity, res.seesaw_value))
        if res.t is not None and res.t < 0 and res.witness_weights is not None:
            certs.append(_pptmix_certificate(res.lams, res.noise, res.t,
                                             res.witness_weights))
        if res.projections is not None:
            rho2 = tensor_copies(mix_white_noise(parse_state_spec(
                "chi:" + ",".join(str(v) for v in res.lams)), res.noise), 2)
            value = projection_witness_value(rho2, res.projections, 0.5)
            certs.append(_projection_certificate(res.lams, res.noise, 0.5,
                                                 res.projections, value))
    meta = {"command": "scan-chi", "step": args.step, "noise": args.noise,
            "seed": args.seed, "points": len(rows)}
    _write_csv(args.out, meta, columns, rows)
    _write_json(_sidecar(args.out), {"schema": 1, "certificates": certs})
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _sidecar(path: str) -> str:
    base, _, _ = path.rpartition(".")
    return (base or path) + ".json"


def _parallel_map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (workers * 8))))


# ---------------------------------------------------------------------------
# robustness / fidelity

def run_robustness(args) -> int:
    if args.state:
        rho = mix_white_noise(parse_state_spec(args.state), args.noise_level)
        weights = ghz_twirl(rho).weights
        res = two_copy_pptmix(weights)
        p_wnr = white_noise_robustness(min(res.value, 0.0), 64) if res.detected else None
        print(f"t = {res.value:.9g}")
        print(f"p_wnr = {p_wnr:.9g}" if p_wnr else "not detected (t >= 0)")
        if args.out:
            cert = {
                "kind": "pptmix",
                "state": {"spec": args.state},
                "value": res.value,
                "p_wnr": p_wnr,
                "witness_weights": _sparse(res.witness_weights),
                "components": {
                    str(x): {"p": _sparse(p), "q": _sparse(q)}
                    for x, (p, q) in res.components.items()
                },
                "dim": 64,
            }
            _write_json(args.out, {"schema": 1, "certificates": [cert]})
        return 0
    rows = []
    for x, y, z in sorted(chi_grid(args.step)):
        res = classify_point((1.0, x, y, z), args.noise_level,
                             stages=("partition", "pptmix"))
        rows.append((x, y, z, res.noise, res.label.value, res.t, res.p_wnr))
    _write_csv(args.out or "robustness.csv",
               {"command": "robustness", "step": args.step},
               ["x", "y", "z", "p", "label", "t", "p_wnr"], rows)
    return 0


def run_fidelity(args) -> int:
    if args.state:
        rho = parse_state_spec(args.state)
        rho2 = tensor_copies(mix_white_noise(rho, args.noise_level), 2)
        res = fidelity_bound(rho2, starts=args.starts, iters=args.iters,
                             seed=args.seed, steps=args.bisection_steps)
        print(f"fidelity lower bound = {res.kappa:.9g}")
        if args.out and res.projections is not None:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(res.projections.to_json())
        return 0
    rows = []
    for x, y, z in sorted(chi_grid(args.step)):
        rho = mix_white_noise(parse_state_spec(f"chi:1,{x},{y},{z}"), args.noise_level)
        res = fidelity_bound(tensor_copies(rho, 2), starts=args.starts,
                             iters=args.iters, seed=args.seed,
                             steps=args.bisection_steps)
        rows.append((x, y, z, args.noise_level, res.kappa))
    _write_csv(args.out or "fidelity.csv",
               {"command": "fidelity", "step": args.step},
               ["x", "y", "z", "p", "fidelity_bound"], rows)
    return 0


# ---------------------------------------------------------------------------
# seesaw / ghh / ghz-symmetric

def run_seesaw(args) -> int:
    rho = mix_white_noise(parse_state_spec(args.state), args.noise_level)
    x_op = build_seesaw_operator(tensor_copies(rho, 2), ghz_witness(args.kappa))
    res = seesaw(x_op, starts=args.starts, iters=args.iters, seed=args.seed)
    print(f"C = {res.value:.9g} (start {res.start_index}, {res.iterations} iterations)")
    if res.detected:
        print("projection found: state is two-copy GME detectable on one copy")
    if args.out:
        cert = _projection_certificate_from_spec(args.state, args.noise_level,
                                                 args.kappa, res)
        _write_json(args.out, {"schema": 1, "certificates": [cert]})
    return 0


def _projection_certificate_from_spec(spec, noise, kappa, res) -> dict:
    pset = res.projections()
    rho2 = tensor_copies(mix_white_noise(parse_state_spec(spec), noise), 2)
    value = projection_witness_value(rho2, pset, kappa)
    return {
        "kind": "projection",
        "state": {"spec": spec, "noise": noise},
        "kappa": kappa,
        "value": value,
        "projections": json.loads(pset.to_json()),
    }


def run_ghh(args) -> int:
    from .criteria import rho1_detect, rho2_detect

    detect = {"rho1": rho1_detect, "rho2": rho2_detect}.get(args.family)
    if detect is None:
        raise ConfigError(f"unknown family {args.family!r}")
    ks = list(range(1, args.kmax + 1))
    rows = []
    n = round(1.0 / args.step)
    for i in range(n + 1):
        p1 = i * args.step
        for j in range(i + 1):
            p2 = j * args.step
            if p1 + p2 > 1 + 1e-12:
                continue
            for k in ks:
                rows.append((p1, p2, k, detect(p1, p2, k)))
    _write_csv(args.out, {"command": "ghh", "family": args.family,
                          "step": args.step, "kmax": args.kmax},
               ["p_plus1", "second_param", "k", "detected"], rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def run_ghz_symmetric(args) -> int:
    rho = parse_state_spec(args.state)
    weights = ghz_twirl(rho).weights
    rows = []
    for k in range(1, args.powers + 1):
        wk = np.asarray(ghz_weights_schur_power(weights, k), dtype=float)
        from .states import GhzDiagCoeffs

        coords = ghz_symmetric_coords(GhzDiagCoeffs(wk).to_density())
        rows.append((k, coords.x, coords.y, wk[0]))
    if args.out:
        _write_csv(args.out, {"command": "ghz-symmetric", "state": args.state},
                   ["k", "x", "y", "ghz_fidelity"], rows)
    for k, x, y, fid in rows:
        print(f"k={k}: x={x:.9g} y={y:.9g} fidelity={fid:.9g}")
    return 0


# ---------------------------------------------------------------------------
# simulate-witness / graph-fuse / ice

def run_simulate_witness(args) -> int:
    rho = parse_state_spec(args.state)
    two = replicate(rho, k=2, shots=args.shots, reps=args.reps, seed=args.seed)
    one = replicate(rho, k=2, shots=args.shots, reps=args.reps, seed=args.seed,
                    estimate_k=1)
    print(f"two-copy witness: mean={two.mean:.6f} std={two.std:.6f}")
    print(f"single-copy witness: mean={one.mean:.6f} std={one.std:.6f}")
    if args.out:
        _write_json(args.out, {
            "schema": 1,
            "state": args.state,
            "shots": args.shots,
            "replications": args.reps,
            "seed": args.seed,
            "two_copy": json.loads(two.to_json()),
            "single_copy": json.loads(one.to_json()),
        })
        hist_path = args.out.rsplit(".", 1)[0] + "_hist.csv"
        with open(hist_path, "w", encoding="utf-8") as fh:
            fh.write(two.histogram_csv())
    return 0


def run_graph_fuse(args) -> int:
    with open(args.graph, "r", encoding="utf-8") as fh:
        g = read_edge_list(fh.read())
    if args.copies != 2:
        raise ConfigError("the fusion scheme is pairwise; use --copies 2")
    fused = two_color_fuse(g, 2)
    graphs_match = fused.edges == g.edges
    vec = fuse_two_copies_state(g)
    ref = graph_state(g)
    overlap = abs(np.vdot(ref, vec))
    print(f"graphical fixed point: {'yes' if graphs_match else 'NO'}")
    print(f"state-vector overlap after fusion: {overlap:.12f}")
    if args.out_dot:
        with open(args.out_dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(fused))
    if not graphs_match or overlap < 1 - 1e-10:
        print("fixed-point property violated", file=sys.stderr)
        return 3
    return 0


def run_ice(args) -> int:
    party = {"A": 0, "B": 1, "C": 2}.get(args.party)
    if party is None:
        raise ConfigError("party must be A, B or C")
    n = int(round((args.pmax - args.pmin) / args.step))
    ps = [args.pmin + i * args.step for i in range(n + 1)]
    report = ice_pipeline(args.family, ps, party)
    columns = ["p", "min_pt_A", "min_pt_B", "min_pt_C",
               "proj_min_pt_A", "proj_min_pt_B", "proj_min_pt_C"]
    rows = [(pt.p, *pt.min_pt, *pt.min_pt_projected) for pt in report.points]
    _write_csv(args.out, {"command": "ice", "family": args.family,
                          "party": args.party}, columns, rows)
    _write_json(_sidecar(args.out), {
        "schema": 1,
        "family": report.family,
        "party": args.party,
        "npt_thresholds": [float(v) for v in report.npt_thresholds],
        "npt_thresholds_projected": [float(v) for v in report.npt_thresholds_projected],
        "reference_windows": report.annotations,
    })
    print(f"NPT thresholds (two-copy): {report.npt_thresholds}")
    print(f"NPT thresholds (projected): {report.npt_thresholds_projected}")
    return 0


# ---------------------------------------------------------------------------
# verify

def _rebuild_state(state: dict):
    if "spec" in state:
        rho = parse_state_spec(state["spec"])
        noise = state.get("noise", 1.0)
        return mix_white_noise(rho, noise)
    lams = state["lams"]
    rho = parse_state_spec("chi:" + ",".join(str(v) for v in lams))
    return mix_white_noise(rho, state.get("noise", 1.0))


def _verify_one(cert: dict) -> bool:
    kind = cert.get("kind")
    if kind == "pptmix":
        rho = _rebuild_state(cert["state"])
        weights = ghz_twirl(rho).weights
        coeffs = np.kron(weights, weights)
        w = _unsparse(cert["witness_weights"], 64)
        value = float(coeffs @ w)
        if abs(value - cert["value"]) > 1e-6:
            return False
        if "components" in cert:
            comps = {
                int(x): (_unsparse(pq["p"], 64), _unsparse(pq["q"], 64))
                for x, pq in cert["components"].items()
            }
            return verify_pptmix_certificate(coeffs, w, comps, product_pt_maps(2), cert["value"]) and value < 0
        # without the decomposition, check the witness property by eigenvalues
        return value < 0 and _witness_weights_valid(w)
    if kind == "projection":
        rho = _rebuild_state(cert["state"])
        pset = ProjectionSet.from_json(json.dumps(cert["projections"]))
        value = projection_witness_value(tensor_copies(rho, 2), pset, cert["kappa"])
        return value < 0 and abs(value - cert["value"]) < 1e-6
    raise ConfigError(f"unknown certificate kind {kind!r}")


def _witness_weights_valid(w: np.ndarray) -> bool:
    """Feasibility of diagonal witness weights for the PPT-mixture cone."""
    from .lp import LinearProgram, lp_solve, LpInfeasibleError

    maps = product_pt_maps(2)
    k = w.size
    a = np.zeros((3 * k, 2 * 3 * k))
    for x, m in enumerate(maps):
        a[x * k : (x + 1) * k, 2 * x * k : (2 * x + 1) * k] = np.eye(k)
        a[x * k : (x + 1) * k, (2 * x + 1) * k : (2 * x + 2) * k] = m
    b = np.concatenate([w, w, w])
    try:
        lp_solve(LinearProgram(np.zeros(a.shape[1]), a, b))
        return True
    except LpInfeasibleError:
        return False


def run_verify(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    certs = payload.get("certificates", [])
    bad = 0
    for i, cert in enumerate(certs):
        ok = _verify_one(cert)
        print(f"certificate {i} [{cert.get('kind')}]: {'ok' if ok else 'FAILED'}")
        bad += 0 if ok else 1
    if bad:
        print(f"{bad} of {len(certs)} certificates failed", file=sys.stderr)
        return 3
    print(f"all {len(certs)} certificates verified")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sp, out_default=None, noise=False):
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=_default_workers())
    if out_default is not None:
        sp.add_argument("--out", default=out_default)
    if noise:
        sp.add_argument("--noise-level", type=float, default=1.0,
                        help="weight of the state in the white-noise mixture")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmeact",
        description="multi-copy activation of genuine multipartite entanglement",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scan-chi", help="classify the biseparable chi grid")
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--noise", default="1.0", help="comma list of state weights p")
    sp.add_argument("--stages", default=",".join(ALL_STAGES))
    sp.add_argument("--starts", type=int, default=10)
    sp.add_argument("--iters", type=int, default=30)
    _add_common(sp, out_default="scan.csv")
    sp.set_defaults(func=run_scan_chi)

    sp = sub.add_parser("robustness", help="white-noise robustness via the witness LP")
    sp.add_argument("--state", default=None, help="state spec like chi:5,4,3,0")
    sp.add_argument("--step", type=float, default=0.05)
    _add_common(sp, out_default=None, noise=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=run_robustness)

    sp = sub.add_parser("fidelity", help="post-projection fidelity lower bound")
    sp.add_argument("--state", default=None)
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--starts", type=int, default=10)
    sp.add_argument("--iters", type=int, default=30)
    sp.add_argument("--bisection-steps", type=int, default=20)
    _add_common(sp, out_default=None, noise=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=run_fidelity)

    sp = sub.add_parser("seesaw", help="product-vector search for one state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--kappa", type=float, default=0.5)
    sp.add_argument("--starts", type=int, default=10)
    sp.add_argument("--iters", type=int, default=30)
    _add_common(sp, out_default=None, noise=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=run_seesaw)

    sp = sub.add_parser("ghh", help="k-copy detection region sweeps")
    sp.add_argument("--family", required=True, choices=["rho1", "rho2"])
    sp.add_argument("--step", type=float, default=0.02)
    sp.add_argument("--kmax", type=int, default=5)
    _add_common(sp, out_default="ghh.csv")
    sp.set_defaults(func=run_ghh)

    sp = sub.add_parser("ghz-symmetric", help="symmetric-plane coordinates and "
                                              "entrywise-power trajectories")
    sp.add_argument("--state", default="rho_act")
    sp.add_argument("--powers", type=int, default=10)
    _add_common(sp, out_default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=run_ghz_symmetric)

    sp = sub.add_parser("simulate-witness", help="shot-noise statistics of the "
                                                 "nonlinear witness")
    sp.add_argument("--state", default="noisy_ghz:0.4285714285714286")
    sp.add_argument("--shots", type=int, default=10000)
    sp.add_argument("--reps", type=int, default=500)
    _add_common(sp, out_default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=run_simulate_witness)

    sp = sub.add_parser("graph-fuse", help="two-copy fusion demo for a graph")
    sp.add_argument("--graph", required=True, help="edge-list file")
    sp.add_argument("--copies", type=int, default=2)
    sp.add_argument("--out-dot", default=None)
    _add_common(sp)
    sp.set_defaults(func=run_graph_fuse)

    sp = sub.add_parser("ice", help="incompressibility NPT pipeline")
    sp.add_argument("--family", required=True, choices=["rho_s", "rho_u"])
    sp.add_argument("--party", default="A")
    sp.add_argument("--pmin", type=float, default=0.0)
    sp.add_argument("--pmax", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=0.05)
    _add_common(sp, out_default="ice.csv")
    sp.set_defaults(func=run_ice)

    sp = sub.add_parser("verify", help="re-validate stored certificates")
    sp.add_argument("infile")
    sp.set_defaults(func=run_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (LpCertificationError, PtClosureError, AssertionError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
