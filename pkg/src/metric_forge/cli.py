"""Command-line frontend: generators, embeddings, solvers, and oracles.

Every run emits one JSON record {schema, subcommand, seed, input_digest,
wall_time_s, result}. The seed is always explicit in the record (defaulted
seeds are generated, then recorded); numeric fields are rendered with 17
significant digits so reruns with the recorded seed reproduce the result
fields bitwise. Exit codes: 0 success, 1 computational error (error name in
the record), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import secrets
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import io as mfio
from .bandwidth import bandwidth_bruteforce, bandwidth_of, beta_lower_bound, feige_label
from .c2 import DualCertificate, c2_sdp, certificate_value, q_expander, q_hypercube, ramsey_subset
from .core import MetricMap, PointSet, distortion, shortest_path_metric, validate_metric
from .embed import BourgainParams, JlParams, bourgain_embed, jl_project
from .errors import MetricForgeError
from .families import FamilySpec, generate
from .flowcut import dual_metric, max_concurrent_flow, round_to_cut, sparsest_cut_bruteforce
from .hst import estimate_stretch, sample_hst, tree_metric
from .seeding import derive_seed, spawn_seeds

SEED_ENV = "METRIC_FORGE_SEED"


@dataclass
class RunConfig:
    """Everything a run needs to be reproducible."""

    subcommand: str
    inputs: list[str] = field(default_factory=list)
    seed: int = 0
    trials: int = 1
    tolerance: Optional[float] = None
    out: Optional[str] = None
    jobs: int = 1


# -- deterministic JSON ---------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return f'"{x}"'
    return format(float(x), ".17g")


def render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True or obj is False:
        return "true" if obj else "false"
    if isinstance(obj, (np.floating, float)):
        return _fmt_float(float(obj))
    if isinstance(obj, (np.integer, int)):
        return str(int(obj))
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, np.ndarray):
        return render_json(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join("  " * (indent + 1) + render_json(v, indent + 1) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            "  " * (indent + 1) + render_json(str(k)) + ": " + render_json(v, indent + 1)
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot render {type(obj)!r}")


def _digest(paths: Sequence[str]) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def _run_trials(fn: Callable[[int], object], seeds: Sequence[int], jobs: int) -> list:
    if jobs <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, seeds))


# -- handlers -------------------------------------------------------------------

def _handle_gen(args, seed: int) -> dict:
    params = tuple(int(p) for p in args.params)
    if args.family == "random_regular":
        if len(params) != 2:
            raise MetricForgeError("random_regular takes n and k")
        spec = FamilySpec("random_regular", (params[0], params[1],
                                             derive_seed(seed, "gen.random_regular")))
    else:
        spec = FamilySpec(args.family, params)
    g = generate(spec)
    if args.out:
        mfio.write_graph_file(args.out, g)
    return {"family": args.family, "params": list(params), "n": g.n, "m": g.m,
            "out": args.out}


def _handle_metric(args, seed: int) -> dict:
    g = mfio.read_graph_file(args.graph)
    m = shortest_path_metric(g)
    if args.out:
        mfio.write_metric_csv(args.out, m.dist)
    return {"n": m.n, "diameter": m.diameter(), "out": args.out}


def _load_metric(path: str):
    return validate_metric(mfio.read_metric_csv(path))


def _handle_embed(args, seed: int) -> dict:
    if args.kind == "frechet":
        from .core import frechet_linf_embed

        x = _load_metric(args.input)
        pts = frechet_linf_embed(x)
        rep = distortion(MetricMap.identity(x, pts, math.inf))
        if args.points_out:
            mfio.write_pointset_csv(args.points_out, pts)
        return {"kind": "frechet", "n": x.n, "dimension": pts.k,
                "expansion": rep.expansion, "contraction": rep.contraction,
                "distortion": rep.distortion, "points_out": args.points_out}

    if args.kind == "bourgain":
        x = _load_metric(args.input)
        norm = int(args.norm)
        seeds = spawn_seeds(seed, "embed.bourgain", args.trials)

        def one(s: int):
            params = BourgainParams(seed=s, sets_per_scale=args.sets_per_scale)
            pts, _ = bourgain_embed(x, params, norm=norm)
            rep = distortion(MetricMap.identity(x, pts, norm))
            return rep, pts

        results = _run_trials(one, seeds, args.jobs)
        per_trial = [r.distortion for r, _ in results]
        best_idx = int(np.argmin(per_trial))
        rep, pts = results[best_idx]
        if args.points_out:
            mfio.write_pointset_csv(args.points_out, pts)
        return {"kind": "bourgain", "n": x.n, "dimension": pts.k, "norm": norm,
                "trials": args.trials, "per_trial_distortion": per_trial,
                "best_trial": best_idx, "expansion": rep.expansion,
                "contraction": rep.contraction, "distortion": rep.distortion,
                "points_out": args.points_out}

    # jl
    pts = mfio.read_pointset_csv(args.input)
    params = JlParams(epsilon=args.epsilon, target_dim_override=args.dim,
                      seed=derive_seed(seed, "embed.jl"))
    proj = jl_project(pts, params)
    before = pts.distances(2)
    after = proj.distances(2)
    iu = np.triu_indices(pts.n, k=1)
    ratios = after[iu] / before[iu]
    dist_val = float(ratios.max() / ratios.min())
    if args.points_out:
        mfio.write_pointset_csv(args.points_out, proj)
    return {"kind": "jl", "n": pts.n, "input_dim": pts.k, "target_dim": proj.k,
            "epsilon": args.epsilon, "distortion": dist_val,
            "points_out": args.points_out}


def _handle_c2(args, seed: int) -> dict:
    if args.action == "solve":
        x = _load_metric(args.input)
        res = c2_sdp(x, rel_tol=args.tol)
        return {"action": "solve", "n": x.n, "value": res.value,
                "tolerance": res.tolerance}
    if args.action == "certify":
        x = _load_metric(args.input)
        if args.certificate:
            cert = DualCertificate(mfio.read_matrix_csv(args.certificate))
        elif args.q_hypercube is not None:
            cert = q_hypercube(args.q_hypercube)
        elif args.q_expander:
            cert = q_expander(mfio.read_graph_file(args.q_expander))
        else:
            raise MetricForgeError(
                "certify needs --certificate, --q-hypercube, or --q-expander"
            )
        import warnings

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            value = certificate_value(cert, x)
        degenerate = any(w.category.__name__ == "DegenerateCertificate" for w in caught)
        out = {"action": "certify", "n": x.n, "value": value, "degenerate": degenerate}
        if args.out_certificate:
            mfio.write_matrix_csv(args.out_certificate, cert.q)
            out["certificate_out"] = args.out_certificate
        return out
    # ramsey
    x = _load_metric(args.input)
    subset, size = ramsey_subset(x, args.t, rel_tol=args.tol)
    return {"action": "ramsey", "n": x.n, "t": args.t,
            "subset": [int(i) for i in subset], "size": size}


def _handle_hst(args, seed: int) -> dict:
    x = _load_metric(args.input)
    if args.action == "sample":
        tree = sample_hst(x, derive_seed(seed, "hst.sample"))
        metric = tree_metric(tree)
        dominated = bool(np.all(metric.dist + 1e-12 >= x.dist)) if x.n > 1 else True
        if args.out_tree:
            mfio.write_hst_file(args.out_tree, tree)
        return {"action": "sample", "n": x.n, "base_diameter": tree.base_diameter,
                "domination_verified": dominated, "tree_out": args.out_tree}
    # stretch
    max_stretch, per_pair = estimate_stretch(x, args.trials, derive_seed(seed, "hst.stretch"))
    return {"action": "stretch", "n": x.n, "trials": args.trials,
            "max_expected_stretch": max_stretch}


def _handle_flowcut(args, seed: int) -> dict:
    inst = mfio.read_instance_file(args.input)
    if args.action == "solve":
        fr = max_concurrent_flow(inst)
        dm = dual_metric(inst, fr.phi)
        return {"action": "solve", "n": inst.graph.n, "k": inst.k, "phi": fr.phi,
                "dual_objective": dm.objective,
                "duality_gap": abs(dm.objective - fr.phi)}
    if args.action == "round":
        fr = max_concurrent_flow(inst)
        dm = dual_metric(inst, fr.phi)
        params = BourgainParams(seed=derive_seed(seed, "flowcut.round"))
        cut = round_to_cut(inst, dm.metric, params)
        return {"action": "round", "phi": fr.phi,
                "cut_subset": [int(i) for i in cut.subset], "gamma": cut.gamma,
                "duality_gap": abs(dm.objective - fr.phi)}
    # exact
    cut = sparsest_cut_bruteforce(inst)
    return {"action": "exact", "cut_subset": [int(i) for i in cut.subset],
            "gamma": cut.gamma, "capacity": cut.capacity,
            "demand_cut": cut.demand_cut}


def _handle_bandwidth(args, seed: int) -> dict:
    g = mfio.read_graph_file(args.graph)
    if args.action == "beta":
        return {"action": "beta", "n": g.n, "beta": beta_lower_bound(g)}
    if args.action == "exact":
        bw, lab = bandwidth_bruteforce(g)
        return {"action": "exact", "n": g.n, "bw": bw,
                "labeling": list(lab.labels)}
    # feige
    seeds = spawn_seeds(seed, "bandwidth.feige", args.trials)

    def one(s: int):
        return feige_label(g, BourgainParams(seed=s))

    results = _run_trials(one, seeds, args.jobs)
    per_trial = [bw for _, bw in results]
    best_idx = int(np.argmin(per_trial))
    lab, bw = results[best_idx]
    out = {"action": "feige", "n": g.n, "trials": args.trials,
           "per_trial_bw": per_trial, "labeling": list(lab.labels),
           "achieved_bw": bw, "beta": beta_lower_bound(g)}
    if g.n <= 10:
        out["oracle_bw"] = bandwidth_bruteforce(g)[0]
    return out


def _handle_report(args, seed: int) -> dict:
    import json

    headline_keys = ("value", "phi", "gamma", "achieved_bw", "bw", "distortion",
                     "max_expected_stretch", "beta", "size")
    rows = []
    for path in args.records:
        rec = json.loads(Path(path).read_text())
        result = rec.get("result", {}) or {}
        metric_name, metric_value = "", ""
        for key in headline_keys:
            if key in result:
                metric_name, metric_value = key, result[key]
                break
        rows.append({
            "subcommand": rec.get("subcommand", ""),
            "seed": rec.get("seed", ""),
            "input_digest": rec.get("input_digest", "")[:12],
            "wall_time_s": rec.get("wall_time_s", ""),
            "metric": metric_name,
            "value": metric_value,
        })
    lines = ["subcommand,seed,input_digest,metric,value"]
    for r in rows:
        lines.append(f"{r['subcommand']},{r['seed']},{r['input_digest']},{r['metric']},{r['value']}")
    table = "\n".join(lines) + "\n"
    if args.table_out:
        Path(args.table_out).write_text(table)
    return {"records": len(rows), "table_out": args.table_out,
            "rows": [f"{r['subcommand']}:{r['metric']}={r['value']}" for r in rows]}


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-forge",
        description="Embeddings, distortion certificates, tree metrics, and "
                    "flow/cut experiments over finite metric spaces.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"master seed (default: ${SEED_ENV} or random, recorded)")
    common.add_argument("--out", default=None, help="write the JSON record here")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    p = sub.add_parser("gen", help="generate a graph family")
    p.add_argument("family", choices=["hypercube", "complete_binary_tree", "path",
                                      "cycle", "star", "random_regular"])
    p.add_argument("params", nargs="+", help="family parameters")
    p.set_defaults(handler=_handle_gen, inputs=lambda a: [])

    p = sub.add_parser("metric", help="shortest-path metric of a graph file")
    p.add_argument("graph")
    p.set_defaults(handler=_handle_metric, inputs=lambda a: [a.graph])

    p = sub.add_parser("embed", help="embed a metric or project points")
    p.add_argument("kind", choices=["bourgain", "jl", "frechet"])
    p.add_argument("input", help="metric CSV (bourgain/frechet) or points CSV (jl)")
    p.add_argument("--sets-per-scale", type=int, default=None)
    p.add_argument("--norm", choices=["1", "2"], default="2")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--dim", type=int, default=None, help="jl target dimension override")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--points-out", default=None)
    p.set_defaults(handler=_handle_embed, inputs=lambda a: [a.input])

    p = sub.add_parser("c2", help="minimum Euclidean distortion tools")
    p.add_argument("action", choices=["solve", "certify", "ramsey"])
    p.add_argument("input", help="metric CSV")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--t", type=float, default=1.0, help="ramsey distortion budget")
    p.add_argument("--certificate", default=None, help="certificate CSV to evaluate")
    p.add_argument("--q-hypercube", type=int, default=None,
                   help="build the hypercube certificate of this dimension")
    p.add_argument("--q-expander", default=None,
                   help="build the expander certificate from this graph file")
    p.add_argument("--out-certificate", default=None)
    p.set_defaults(handler=_handle_c2,
                   inputs=lambda a: [a.input] + ([a.certificate] if a.certificate else [])
                   + ([a.q_expander] if a.q_expander else []))

    p = sub.add_parser("hst", help="dominating tree sampling and stretch")
    p.add_argument("action", choices=["sample", "stretch"])
    p.add_argument("input", help="metric CSV")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out-tree", default=None)
    p.set_defaults(handler=_handle_hst, inputs=lambda a: [a.input])

    p = sub.add_parser("flowcut", help="concurrent flow, duality, and cuts")
    p.add_argument("action", choices=["solve", "round", "exact"])
    p.add_argument("input", help="flow instance file")
    p.set_defaults(handler=_handle_flowcut, inputs=lambda a: [a.input])

    p = sub.add_parser("bandwidth", help="bandwidth heuristic and oracles")
    p.add_argument("action", choices=["feige", "exact", "beta"])
    p.add_argument("graph")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=_handle_bandwidth, inputs=lambda a: [a.graph])

    p = sub.add_parser("report", help="summarize JSON records as a CSV table")
    p.add_argument("records", nargs="+")
    p.add_argument("--table-out", default=None)
    p.set_defaults(handler=_handle_report, inputs=lambda a: list(a.records))

    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed & ((1 << 64) - 1)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env) & ((1 << 64) - 1)
    return secrets.randbits(64)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = _resolve_seed(args)
    inputs = args.inputs(args)
    try:
        digest = _digest(inputs)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    try:
        result = args.handler(args, seed)
        error = None
    except MetricForgeError as exc:
        result = None
        error = exc
    wall = time.perf_counter() - t0

    record = {
        "schema": 1,
        "subcommand": args.subcommand,
        "seed": seed,
        "input_digest": digest,
        "wall_time_s": wall,
    }
    if error is not None:
        record["error"] = error.name
        record["detail"] = str(error)
    else:
        record["result"] = result
    text = render_json(record) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 1 if error is not None else 0


if __name__ == "__main__":
    sys.exit(main())
