"""Command-line surface: generate, solve, bound, reduce, certify, benchmark.

Exit codes: 0 ok, 1 internal error, 2 usage or validation error.  All
randomness flows from explicit --seed flags; benchmark CSV output is
byte-identical across reruns of the same config (timings are therefore left
out of the bench rows and printed only by `solve`).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import core, exact, generators, hardness, rounding, sdp, spectral
from .core import ParseError, ValidationError
from .exact import BudgetExceeded

CSV_HEADER = "instance_id,family,n,seed,algo,value,bound,bound_kind,ratio,support,runtime_ms,status"


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _load_ratio_instance(path) -> core.QpRatioInstance:
    inst = core.load_instance(path)
    if not isinstance(inst, core.QpRatioInstance):
        raise ValidationError(f"{path} does not hold a plain ratio instance")
    return inst


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def _gen_instance(spec: dict) -> core.QpRatioInstance:
    family = spec.get("family")
    if family == "star":
        return generators.gen_star(int(spec["leaves"]))
    if family == "bipartite-gap":
        return generators.gen_bipartite_gap(int(spec["n"]), int(spec.get("seed", 0)))
    if family == "planted":
        params = generators.PlantedParams(
            n=int(spec["n"]),
            r=spec.get("r"),
            p=spec.get("p"),
            planted_size=spec.get("planted_size"),
            delta=float(spec.get("delta", 0.1)),
            seed=int(spec.get("seed", 0)),
        )
        return generators.gen_planted(params)[0]
    if family == "level-graph":
        return generators.gen_level_graph(
            generators.LevelGraphParams(eps=float(spec["eps"]), n0=int(spec.get("n0", 1)))
        )
    if family == "random":
        return generators.random_instance(
            int(spec["n"]), int(spec.get("seed", 0)), float(spec.get("density", 1.0))
        )
    if family == "apx-gadget":
        if "cycle" in spec and spec["cycle"]:
            n = int(spec["cycle"])
            edges = [(i, (i + 1) % n) for i in range(n)] if n > 2 else []
            d = 2 if n > 2 else 0
        else:
            with open(spec["graph"]) as fh:
                gobj = json.load(fh)
            n = int(gobj["n"])
            edges = [tuple(e) for e in gobj["edges"]]
            d = int(gobj["d"])
        return generators.gen_apx_gadget(n, edges, d)
    raise ValidationError(f"unknown instance family {family!r}")


def cmd_gen(args) -> int:
    spec = {k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None}
    spec["family"] = args.family
    if args.family == "kand":
        inst = hardness.gen_kand(args.n, args.m, args.k, args.seed)
        obj = {
            "kind": "kand",
            "n": inst.n,
            "k": inst.k,
            "clauses": [[[v, s] for v, s in clause] for clause in inst.clauses],
            "meta": {"seed": args.seed},
        }
        with open(args.out, "w") as fh:
            json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
    else:
        inst = _gen_instance(spec)
        core.save_instance(inst, args.out)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# solve / exact / relax
# ---------------------------------------------------------------------------

def _run_algo(inst: core.QpRatioInstance, algo: str, seed: int, eps: float):
    if algo == "general":
        return rounding.solve_general(inst, seed=seed)
    if algo == "bipartite":
        return rounding.solve_bipartite(inst, seed=seed)
    if algo == "trevisan":
        _, x = spectral.normalized_eig(inst, seed=seed)
        if not np.any(x):
            return core.trivial_solution(inst)
        a, _ = spectral.trevisan_round(inst, x)
        return a, core.eval_normalized_qp_ratio(inst, a)
    if algo == "psd":
        if not inst.entries:
            return core.trivial_solution(inst)
        dense = inst.to_dense()
        res = spectral.eigen_max(dense, seed=seed)
        # canonical PSD completion: lift the diagonal by |min eigenvalue|
        min_eig = -spectral.eigen_max(-dense, seed=seed).lambda_max
        shift = max(0.0, -min_eig) * (1.0 + 1e-9) + 1e-12
        diag = np.full(inst.n, shift)
        return spectral.psd_polylog_round(inst, res.vector, diag=diag, seed=seed)
    if algo == "high-opt":
        return spectral.solve_high_opt(inst, eps, seed=seed)
    raise ValidationError(f"unknown algorithm {algo!r}")


def _bound_for(inst: core.QpRatioInstance, cap: int, normalized: bool) -> tuple[float, str]:
    if inst.n <= cap:
        oracle = exact.brute_force_normalized if normalized else exact.brute_force_qp_ratio
        return oracle(inst, cap=cap)[1].value, "oracle"
    if normalized:
        return spectral.normalized_eig_value(inst), "eig"
    return spectral.eig_relaxation_value(inst), "eig"


def _result_row(instance_id, family, n, seed, algo, value, bound, bound_kind, support, runtime_ms, status):
    numeric = isinstance(value, (int, float)) and isinstance(bound, (int, float))
    ratio = value / bound if (numeric and bound > 1e-15) else ""
    cells = [
        instance_id,
        family,
        n,
        seed,
        algo,
        value,
        bound,
        bound_kind,
        ratio,
        support,
        runtime_ms,
        status,
    ]
    return ",".join(_fmt(c) for c in cells)


def cmd_solve(args) -> int:
    inst = _load_ratio_instance(args.instance)
    if args.algo == "bipartite" and inst.bipartition is None:
        raise ValidationError("algorithm 'bipartite' needs an instance with a bipartition")
    t0 = time.perf_counter()
    a, val = _run_algo(inst, args.algo, args.seed, args.eps)
    runtime_ms = int(round(1000 * (time.perf_counter() - t0)))
    bound, bound_kind = _bound_for(inst, args.cap, normalized=(args.algo == "trevisan"))
    meta = inst.meta or {}
    row = _result_row(
        os.path.basename(args.instance),
        meta.get("family", "file"),
        inst.n,
        args.seed,
        args.algo,
        val.value,
        bound,
        bound_kind,
        a.support,
        runtime_ms,
        "ok",
    )
    print(CSV_HEADER)
    print(row)
    if args.csv:
        new = not os.path.exists(args.csv)
        with open(args.csv, "a") as fh:
            if new:
                fh.write(CSV_HEADER + "\n")
            fh.write(row + "\n")
    return 0


def cmd_exact(args) -> int:
    inst = core.load_instance(args.instance)
    if isinstance(inst, core.QpIntermediateInstance):
        x, val = exact.grid_search_intermediate(inst, eps=args.grid_eps, cap=args.cap)
        print(f"optimum {val.value:.12g} (numerator {val.numerator:.12g}, denominator {val.denominator:.12g})")
        print("argmax", list(x.values))
        return 0
    oracle = exact.brute_force_normalized if args.normalized else exact.brute_force_qp_ratio
    a, val = oracle(inst, cap=args.cap)
    print(f"optimum {val.value:.12g} (numerator {val.numerator:.12g}, denominator {val.denominator:.12g})")
    print("argmax", list(a.values))
    return 0


def cmd_relax(args) -> int:
    inst = _load_ratio_instance(args.instance)
    if args.method == "eig":
        print(f"eig bound {spectral.eig_relaxation_value(inst):.12g}")
        return 0
    if args.method == "normalized-eig":
        print(f"normalized eig bound {spectral.normalized_eig_value(inst):.12g}")
        return 0
    sol = sdp.sdp_solve(inst, rank=args.rank, seed=args.seed, restarts=args.restarts)
    print(f"sdp objective {sol.objective:.12g}")
    print(f"residual_norm1 {sol.residual_norm1:.3e} residual_pair {sol.residual_pair:.3e}")
    if args.gram_out:
        with open(args.gram_out, "w") as fh:
            json.dump({"vectors": sol.vectors.tolist()}, fh)
            fh.write("\n")
        print(f"wrote {args.gram_out}")
    return 0


def cmd_certify(args) -> int:
    inst = _load_ratio_instance(args.instance)
    with open(args.gram) as fh:
        obj = json.load(fh)
    sol = sdp.GramSolution.build(inst, np.array(obj["vectors"], dtype=np.float64))
    ok, report = sdp.sdp_feasibility(sol, tol=args.tol)
    print(f"objective {sol.objective:.12g}")
    print(f"residual_norm1 {report['residual_norm1']:.3e} residual_pair {report['residual_pair']:.3e}")
    print("feasible" if ok else "infeasible")
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------

def _load_kand(path) -> hardness.KAndInstance:
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("kind") != "kand":
        raise ParseError(f"{path}: expected kind 'kand'")
    clauses = tuple(tuple((int(v), int(s)) for v, s in clause) for clause in obj["clauses"])
    return hardness.KAndInstance(int(obj["n"]), int(obj["k"]), clauses)


def _load_ug(path) -> hardness.UgInstance:
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("kind") != "ratio_ug":
        raise ParseError(f"{path}: expected kind 'ratio_ug'")
    edges = tuple((int(u), int(v), tuple(int(x) for x in perm)) for u, v, perm in obj["edges"])
    return hardness.UgInstance(int(obj["vertices"]), int(obj["alphabet"]), edges)


def cmd_reduce(args) -> int:
    with open(args.input, "rb") as fh:
        source_hash = hashlib.sha256(fh.read()).hexdigest()[:16]
    if args.source == "kand":
        out, _ = hardness.kand_to_qpratio(_load_kand(args.input), args.alpha)
    elif args.source == "ug":
        out, _ = hardness.ug_to_intermediate(_load_ug(args.input))
    elif args.source == "intermediate":
        src = core.load_instance(args.input)
        if not isinstance(src, core.QpIntermediateInstance):
            raise ValidationError(f"{args.input} does not hold an intermediate instance")
        out, _ = hardness.intermediate_to_qpratio(src, args.eps)
    else:
        raise ValidationError(f"unknown reduction source {args.source!r}")
    meta = dict(out.meta or {})
    meta["source_file"] = os.path.basename(args.input)
    meta["source_sha256_16"] = source_hash
    if isinstance(out, core.QpRatioInstance):
        out = core.QpRatioInstance(out.n, out.entries, out.bipartition, meta)
    else:
        out = core.QpIntermediateInstance(out.n, out.entries, out.diag, meta)
    core.save_instance(out, args.out)
    print(f"wrote {args.out} ({out.n} variables, {len(out.entries)} entries)")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _bench_one(item, algos, cap, seed):
    family = item.get("family", "?")
    iid = item.get("id") or "-".join(
        [family] + [f"{k}{item[k]}" for k in sorted(item) if k not in ("family", "id")]
    )
    rows = []
    try:
        inst = _gen_instance(item)
        bound, bound_kind = _bound_for(inst, cap, normalized=False)
    except Exception as exc:  # noqa: BLE001 - recorded per-row
        for algo in algos:
            rows.append(
                _result_row(iid, family, "", item.get("seed", seed), algo, "", "", "", "", "", f"error:{type(exc).__name__}")
            )
        return rows
    for algo in algos:
        try:
            nb, nk = (bound, bound_kind)
            if algo == "trevisan":
                nb, nk = _bound_for(inst, cap, normalized=True)
            a, val = _run_algo(inst, algo, int(item.get("seed", seed)), eps=0.25)
            rows.append(
                _result_row(iid, family, inst.n, item.get("seed", seed), algo, val.value, nb, nk, a.support, "", "ok")
            )
        except (ValidationError, BudgetExceeded) as exc:
            rows.append(
                _result_row(iid, family, inst.n, item.get("seed", seed), algo, "", "", "", "", "", f"error:{type(exc).__name__}")
            )
    return rows


def _render_svg(rows: list[dict]) -> str:
    width, height, pad = 640, 400, 50
    series: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        if r["status"] != "ok" or r["ratio"] == "":
            continue
        series.setdefault(r["algo"], []).append((float(r["n"]), float(r["ratio"])))
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    xs = [p[0] for pts in series.values() for p in pts] or [1.0]
    ys = [p[1] for pts in series.values() for p in pts] or [1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(1.0, max(ys))
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" y2="{height-pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" stroke="black"/>',
        f'<text x="{width//2}" y="{height-12}" font-size="12" text-anchor="middle">n</text>',
        f'<text x="14" y="{height//2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {height//2})">value / bound</text>',
    ]
    for k, (algo, pts) in enumerate(sorted(series.items())):
        pts = sorted(pts)
        color = palette[k % len(palette)]
        path = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2.5" fill="{color}"/>')
        parts.append(
            f'<text x="{width-pad+4}" y="{pad + 14*k + 10}" font-size="11" fill="{color}">{algo}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_bench(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    algos = cfg.get("algos", ["general"])
    cap = int(cfg.get("cap", 12))
    seed = int(cfg.get("seed", 0))
    items = cfg["instances"]
    threads = int(os.environ.get("QPRL_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda it: _bench_one(it, algos, cap, seed), items))
    else:
        chunks = [_bench_one(it, algos, cap, seed) for it in items]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda line: (line.split(",")[0], line.split(",")[4]))
    out_csv = cfg.get("out_csv", "bench.csv")
    with open(out_csv, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(r + "\n")
    print(f"wrote {out_csv} ({len(rows)} rows)")
    out_svg = cfg.get("out_svg")
    if out_svg:
        header = CSV_HEADER.split(",")
        dicts = [dict(zip(header, r.split(","))) for r in rows]
        with open(out_svg, "w") as fh:
            fh.write(_render_svg(dicts))
        print(f"wrote {out_svg}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qprl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("family", choices=["star", "bipartite-gap", "planted", "level-graph", "random", "apx-gadget", "kand"])
    g.add_argument("--out", required=True)
    g.add_argument("--leaves", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--planted-size", dest="planted_size", type=int)
    g.add_argument("--delta", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--n0", type=int)
    g.add_argument("--density", type=float)
    g.add_argument("--cycle", type=int)
    g.add_argument("--graph")
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a rounding algorithm on an instance file")
    s.add_argument("instance")
    s.add_argument("--algo", required=True, choices=["general", "bipartite", "trevisan", "psd", "high-opt"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", type=float, default=0.25, help="degree filter for high-opt")
    s.add_argument("--cap", type=int, default=12, help="brute-force bound cap")
    s.add_argument("--csv", help="append the result row to this CSV file")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="brute-force or grid-search oracle")
    e.add_argument("instance")
    e.add_argument("--cap", type=int, default=12)
    e.add_argument("--normalized", action="store_true")
    e.add_argument("--grid-eps", dest="grid_eps", type=float, default=0.1)
    e.set_defaults(func=cmd_exact)

    r = sub.add_parser("relax", help="relaxation bounds")
    r.add_argument("instance")
    r.add_argument("--method", required=True, choices=["eig", "normalized-eig", "sdp"])
    r.add_argument("--rank", type=int)
    r.add_argument("--restarts", type=int, default=3)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--gram-out", dest="gram_out")
    r.set_defaults(func=cmd_relax)

    c = sub.add_parser("certify", help="check feasibility of a vector solution file")
    c.add_argument("instance")
    c.add_argument("--gram", required=True)
    c.add_argument("--tol", type=float, default=1e-6)
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("reduce", help="run a reduction on a source file")
    d.add_argument("input")
    d.add_argument("--from", dest="source", required=True, choices=["kand", "ug", "intermediate"])
    d.add_argument("--alpha", type=float, default=1.0)
    d.add_argument("--eps", type=float, default=0.5)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_reduce)

    b = sub.add_parser("bench", help="run a benchmark grid from a JSON config")
    b.add_argument("config")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, BudgetExceeded, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
