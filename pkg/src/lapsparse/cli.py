"""Command-line interface: sparsify, analyze, compare, bench.

Every command reads/writes the text formats from :mod:`lapsparse.graph_io`
and exits 0 exactly when no error diagnostic was emitted. Numerical
results match direct library calls with the same parameters. The
environment variable ``LAPSPARSE_THREADS`` caps BLAS-level parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .exceptions import LapsparseError
from .graph import degree_sequence, is_connected, laplacian_of
from .graph_io import load_graph, save_graph
from .metrics import (
    lambda2_of,
    make_ensemble,
    run_comparison,
    timing_scaling,
)
from .sparsifiers import (
    ApspGreedySparsifier,
    EpsilonSparsifier,
    FiedlerExactSparsifier,
    FiedlerFastSparsifier,
    HybridSparsifier,
    KnnSparsifier,
    LENGTH_MODES,
    apsp_total,
)
from .spectral import dense_spectrum, fiedler_pair, _sign_normalize

_METHOD_CHOICES = (
    "knn",
    "epsilon",
    "hybrid",
    "apsp-greedy",
    "fiedler-exact",
    "fiedler-fast",
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-8, help="eigensolver tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for synthetic inputs")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _estimator(args: argparse.Namespace):
    method = args.method.replace("-", "_")
    if method == "knn":
        return KnnSparsifier(k=args.k)
    if method == "epsilon":
        return EpsilonSparsifier(eps=args.eps)
    if method == "hybrid":
        return HybridSparsifier(d_max=args.dmax, d_min=args.dmin, eps=args.eps)
    if method == "apsp_greedy":
        return ApspGreedySparsifier(
            n_remove=args.budget,
            length_mode=args.length_mode,
            allow_disconnect=args.allow_disconnect,
        )
    if method == "fiedler_exact":
        return FiedlerExactSparsifier(
            n_remove=args.budget,
            allow_disconnect=args.allow_disconnect,
            tol=args.tol,
        )
    if method == "fiedler_fast":
        return FiedlerFastSparsifier(
            n_remove=args.budget,
            allow_disconnect=args.allow_disconnect,
            tol=args.tol,
            refresh_every=args.refresh_every,
        )
    raise LapsparseError(f"unknown method {args.method!r}")


def cmd_sparsify(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    est = _estimator(args).fit(g)
    sparse = est.sparsified_graph_
    trace = est.trace_
    save_graph(sparse, args.output)
    trace_path = args.trace or f"{args.output}.trace.json"
    with open(trace_path, "w") as fh:
        json.dump(trace.to_dict(), fh, indent=2)
        fh.write("\n")
    lam = lambda2_of(sparse)
    print(
        f"{args.method}: edges {g.n_edges} -> {sparse.n_edges}  "
        f"lambda2 {lam:.12g}  trace {trace_path}"
    )
    status = 0
    for note in trace.notes:
        print(f"note: {note}", file=sys.stderr)
        if note.startswith("ResidualBudget"):
            # the requested budget is unreachable under the connectivity guard
            status = 1
    return status


def _analyze_payload(g, tol: float) -> dict:
    n = g.n_nodes
    L = laplacian_of(g)
    if n <= 512:
        spectrum = dense_spectrum(L)
        lam2 = max(float(spectrum.eigenvalues[1]), 0.0) if n >= 2 else 0.0
        v2 = (
            _sign_normalize(spectrum.eigenvectors[:, 1].copy())
            if n >= 2
            else np.zeros(n)
        )
    else:
        pair = fiedler_pair(L, tol=tol)
        lam2, v2 = pair.value, pair.vector
    counts, weighted = degree_sequence(g)
    apsp = {}
    for mode in LENGTH_MODES:
        try:
            total = apsp_total(g, mode)
            apsp[mode] = total if np.isfinite(total) else "inf"
        except LapsparseError as exc:
            apsp[mode] = f"undefined ({exc})"
    return {
        "n_nodes": n,
        "n_edges": g.n_edges,
        "connected": is_connected(g),
        "lambda2": lam2,
        "fiedler_vector_min": {"node": int(np.argmin(v2)), "value": float(v2.min())},
        "fiedler_vector_max": {"node": int(np.argmax(v2)), "value": float(v2.max())},
        "apsp_total": apsp,
        "degree": {
            "min": int(min(counts)),
            "max": int(max(counts)),
            "mean": float(np.mean(counts)),
        },
        "weighted_degree": {
            "min": float(min(weighted)),
            "max": float(max(weighted)),
            "mean": float(np.mean(weighted)),
        },
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    payload = _analyze_payload(g, args.tol)
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
        return 0
    print(f"nodes        {payload['n_nodes']}")
    print(f"edges        {payload['n_edges']}")
    print(f"connected    {payload['connected']}")
    print(f"lambda2      {payload['lambda2']:.12g}")
    vmin, vmax = payload["fiedler_vector_min"], payload["fiedler_vector_max"]
    print(f"fiedler min  {vmin['value']:.6g} at node {vmin['node']}")
    print(f"fiedler max  {vmax['value']:.6g} at node {vmax['node']}")
    for mode, total in payload["apsp_total"].items():
        print(f"apsp[{mode}]  {total}")
    d, wd = payload["degree"], payload["weighted_degree"]
    print(f"degree       min {d['min']}  mean {d['mean']:.4g}  max {d['max']}")
    print(f"w-degree     min {wd['min']:.6g}  mean {wd['mean']:.6g}  max {wd['max']:.6g}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) < 2:
        print("error: --methods needs at least two comma-separated names", file=sys.stderr)
        return 2
    if args.input:
        graphs = [load_graph(p) for p in args.input]
    else:
        graphs = make_ensemble(args.ensemble_size, n_nodes=args.nodes, seed=args.seed)
    levels = (
        [int(v) for v in args.levels.split(",")] if args.levels else None
    )
    report = run_comparison(
        graphs,
        methods,
        levels=levels,
        n_signals=args.signals,
        length_mode=args.length_mode,
        seed=args.seed,
    )
    csv_path = f"{args.output}.csv"
    json_path = f"{args.output}.json"
    report.to_csv(csv_path)
    report.to_json(json_path)
    print(f"wrote {csv_path} and {json_path}")
    for level in report.levels:
        parts = []
        for m in report.methods:
            parts.append(f"{m} lambda2={report.median(m, level, 'lambda2'):.6g}")
        print(f"level {level}: " + "  ".join(parts))
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = timing_scaling(
        sizes,
        k_fraction=args.k_fraction,
        repeats=args.repeats,
        warmup=args.warmup,
        seed=args.seed,
        tol=args.tol,
    )
    payload = [
        {
            "n_nodes": r.n_nodes,
            "n_edges": r.n_edges,
            "n_remove": r.n_remove,
            "exact_seconds": r.exact_seconds,
            "fast_seconds": r.fast_seconds,
            "ratio": r.ratio,
        }
        for r in rows
    ]
    if args.output:
        import csv as _csv

        with open(args.output, "w", newline="") as fh:
            writer = _csv.DictWriter(fh, fieldnames=list(payload[0]))
            writer.writeheader()
            writer.writerows(payload)
        print(f"wrote {args.output}")
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(f"{'n':>6} {'edges':>8} {'removed':>8} {'exact_s':>12} {'fast_s':>12} {'ratio':>8}")
        for r in rows:
            print(
                f"{r.n_nodes:>6} {r.n_edges:>8} {r.n_remove:>8} "
                f"{r.exact_seconds:>12.4f} {r.fast_seconds:>12.4f} {r.ratio:>8.2f}"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lapsparse",
        description="Sparsify dense weighted graphs while preserving algebraic connectivity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sparsify", help="remove edges from a graph")
    p.add_argument("--input", "-i", required=True, help="input graph file")
    p.add_argument("--output", "-o", required=True, help="output graph file")
    p.add_argument("--method", required=True, choices=_METHOD_CHOICES)
    p.add_argument("--k", type=int, default=1, help="neighbors kept per node (knn)")
    p.add_argument("--eps", type=float, default=0.0, help="weight threshold")
    p.add_argument("--dmin", type=int, default=1, help="degree floor (hybrid)")
    p.add_argument("--dmax", type=int, default=None, help="degree cap (hybrid)")
    p.add_argument(
        "--budget", "-K", type=int, default=0, help="edges to remove (greedy methods)"
    )
    p.add_argument("--length-mode", choices=LENGTH_MODES, default="reciprocal")
    p.add_argument("--allow-disconnect", action="store_true")
    p.add_argument("--refresh-every", type=int, default=1)
    p.add_argument("--trace", default=None, help="trace JSON path (default <output>.trace.json)")
    _add_common(p)
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("analyze", help="print spectral and path statistics")
    p.add_argument("--input", "-i", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="run multiple methods and report quality")
    p.add_argument("--input", "-i", nargs="*", default=None, help="graph file(s)")
    p.add_argument("--methods", required=True, help="comma-separated method names")
    p.add_argument("--levels", default=None, help="comma-separated surviving-edge targets")
    p.add_argument("--ensemble-size", type=int, default=20)
    p.add_argument("--nodes", type=int, default=11)
    p.add_argument("--signals", type=int, default=8)
    p.add_argument("--length-mode", choices=LENGTH_MODES, default="reciprocal")
    p.add_argument("--output", "-o", default="comparison", help="report path prefix")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="time exact vs fast greedy sparsification")
    p.add_argument("--sizes", default="20,40,80", help="comma-separated node counts")
    p.add_argument("--k-fraction", type=float, default=0.25)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--output", "-o", default=None, help="CSV output path")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limit = os.environ.get("LAPSPARSE_THREADS")
    try:
        if limit:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(limit)):
                return args.func(args)
        return args.func(args)
    except LapsparseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
