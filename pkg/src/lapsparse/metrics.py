"""Benchmarks: sparsification quality, method agreement, and runtime scaling.

The downstream task the sparsified graphs feed (graph-convolution
training) is not reproduced here; instead quality is measured by how
little a polynomial graph filter's output changes when the dense graph is
swapped for the sparse one, together with the surviving algebraic
connectivity and shortest-path totals. Method agreement is Jaccard
overlap between removal sets.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .exceptions import DimensionMismatchError
from .graph import (
    WeightedGraph,
    complete_graph_from_kernel,
    is_connected,
    laplacian_of,
)
from .sparsifiers import (
    METHODS,
    ApspGreedySparsifier,
    EpsilonSparsifier,
    FiedlerExactSparsifier,
    FiedlerFastSparsifier,
    HybridSparsifier,
    KnnSparsifier,
    apsp_total,
    make_sparsifier,
)
from .spectral import (
    apply_filter,
    dense_spectrum,
    eigenvalue_bound,
    fiedler_pair,
    perturbation_matrix,
    perturbation_score,
)
from .validation import check_coeffs, check_graph

_DENSE_REPORT_CAP = 512


def edge_overlap(removed_a, removed_b) -> float:
    """Jaccard overlap |A intersect B| / |A union B| of two removal sets.

    Both-empty is defined as 1.0 (two methods that both removed nothing
    agree perfectly); disjoint nonempty sets give 0.0.
    """
    a = {tuple(sorted(e)) for e in removed_a}
    b = {tuple(sorted(e)) for e in removed_b}
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def filtering_error(g_full, g_sparse, coeffs, signals) -> float:
    """Mean relative change in filtered signals when edges are removed.

    For each signal x: ||P(L_sparse) x - P(L_full) x|| / ||P(L_full) x||,
    skipping signals the full-graph filter annihilates; the mean over the
    rest is returned (0.0 if every signal was skipped).
    """
    g_full = check_graph(g_full)
    g_sparse = check_graph(g_sparse)
    if g_full.n_nodes != g_sparse.n_nodes:
        raise DimensionMismatchError(
            f"node counts differ: {g_full.n_nodes} vs {g_sparse.n_nodes}"
        )
    coeffs = check_coeffs(coeffs)
    L_full = laplacian_of(g_full)
    L_sparse = laplacian_of(g_sparse)
    errors = []
    for x in signals:
        y_full = apply_filter(L_full, coeffs, x)
        denom = float(np.linalg.norm(y_full))
        if denom == 0.0:
            continue
        y_sparse = apply_filter(L_sparse, coeffs, x)
        errors.append(float(np.linalg.norm(y_sparse - y_full)) / denom)
    return float(np.mean(errors)) if errors else 0.0


def lambda2_of(g: WeightedGraph) -> float:
    """Algebraic connectivity of a graph, densely below the report cap."""
    if g.n_nodes < 2:
        return 0.0
    L = laplacian_of(g)
    if g.n_nodes <= _DENSE_REPORT_CAP:
        return max(float(np.linalg.eigvalsh(L)[1]), 0.0)
    return fiedler_pair(L).value


def bound_bracket_rate(g: WeightedGraph) -> dict:
    """How often the perturbation interval captures the perturbed spectrum.

    For every edge, the interval [lambda2 - score, lambda2 + score] is
    guaranteed to contain SOME eigenvalue of the edge-removed Laplacian;
    whether it contains the new second-smallest one specifically is only a
    heuristic. Returns both observed rates.
    """
    g = check_graph(g)
    L = laplacian_of(g)
    spectrum = dense_spectrum(L)
    lam2 = float(spectrum.eigenvalues[1])
    v2 = spectrum.eigenvectors[:, 1]
    n_any = 0
    n_lam2 = 0
    edges = g.edges()
    for i, j, w in edges:
        lo, hi = eigenvalue_bound(lam2, perturbation_score(i, j, w, v2))
        tilde = np.linalg.eigvalsh(L + perturbation_matrix(i, j, w, g.n_nodes))
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any((tilde >= lo - slack) & (tilde <= hi + slack)):
            n_any += 1
        if lo - slack <= tilde[1] <= hi + slack:
            n_lam2 += 1
    m = len(edges)
    return {
        "n_edges": m,
        "contains_any": n_any / m if m else 1.0,
        "contains_lambda2": n_lam2 / m if m else 1.0,
    }


# ---------------------------------------------------------------------------
# Ensembles, calibration, and the comparison protocol
# ---------------------------------------------------------------------------


def make_ensemble(
    n_graphs: int = 20,
    n_nodes: int = 11,
    seed: int = 0,
    layout: str = "grid",
    bandwidth_scale: float = 0.65,
) -> list[WeightedGraph]:
    """Complete kernel graphs over random planar point sets.

    The default ``grid`` layout jitters points around a regular grid, the
    way contiguous geographic units tile a region; it keeps the second
    Laplacian eigenvalue well separated, so greedy edge choices are
    decisive. ``uniform`` draws i.i.d. points in the unit square instead,
    which often forms accidental clusters with near-degenerate
    connectivity. Kernel bandwidth is ``bandwidth_scale`` times the median
    pairwise distance of each point set.
    """
    if layout not in ("grid", "uniform"):
        raise ValueError(f"layout must be 'grid' or 'uniform', got {layout!r}")
    rng = np.random.default_rng(seed)
    cols = int(np.ceil(np.sqrt(n_nodes)))
    rows = int(np.ceil(n_nodes / cols))
    base = np.array([(x, y) for y in range(rows) for x in range(cols)], dtype=float)
    graphs = []
    for _ in range(n_graphs):
        if layout == "grid":
            keep = rng.permutation(rows * cols)[:n_nodes]
            pts = base[keep] + rng.uniform(-0.2, 0.2, size=(n_nodes, 2))
        else:
            pts = rng.uniform(size=(n_nodes, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(-1))
        bandwidth = bandwidth_scale * float(
            np.median(dist[np.triu_indices(n_nodes, 1)])
        )
        graphs.append(complete_graph_from_kernel(pts, bandwidth))
    return graphs


def default_sparsity_levels(g: WeightedGraph, count: int = 4) -> list[int]:
    """Surviving-edge targets evenly spaced strictly between a spanning
    tree (n - 1 edges) and half the edge count.

    Both extremes are degenerate comparison points: near the full count
    almost nothing is removed and every method looks alike, while at
    exactly n - 1 the connectivity guard forces every greedy method onto
    some spanning tree and the outcome is tree-shape luck rather than
    selection quality. The interior band is where methods differ.
    """
    lo, hi = g.n_nodes - 1, int(round(g.n_edges / 2))
    pts = np.linspace(lo, max(hi, lo + 1), count + 2)[1:-1]
    return sorted({int(round(p)) for p in pts})


def epsilon_for_budget(g: WeightedGraph, n_remove: int) -> float:
    """Threshold that removes the `n_remove` lightest edges.

    Exact when the boundary weight is unique; weight ties make an exact
    budget unreachable by thresholding and then fewer edges are removed.
    """
    weights = sorted(w for _, _, w in g.edges())
    if n_remove <= 0:
        return 0.0
    if n_remove >= len(weights):
        return float(np.nextafter(weights[-1], np.inf))
    return float(weights[n_remove])


def calibrate_sparsifier(
    method: str, g: WeightedGraph, target_edges: int, length_mode: str = "reciprocal"
):
    """Configure a method so it keeps at most `target_edges` edges.

    Greedy methods and thresholding hit the target exactly (up to weight
    ties and the connectivity guard); kNN and hybrid can only realize
    certain edge counts, so the largest parameter whose result does not
    exceed the target is chosen.
    """
    g = check_graph(g)
    target = int(target_edges)
    if not 0 <= target <= g.n_edges:
        raise ValueError(
            f"target_edges must be in [0, {g.n_edges}], got {target_edges!r}"
        )
    key = method.replace("-", "_")
    if key not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    n_remove = g.n_edges - target
    if key == "epsilon":
        return EpsilonSparsifier(eps=epsilon_for_budget(g, n_remove))
    if key == "knn":
        best_k = 1
        for k in range(1, g.n_nodes):
            kept = KnnSparsifier(k=k).fit(g).sparsified_graph_.n_edges
            if kept <= target:
                best_k = k
            else:
                break
        return KnnSparsifier(k=best_k)
    if key == "hybrid":
        best = 1
        for d_max in range(1, g.n_nodes):
            kept = HybridSparsifier(d_max=d_max).fit(g).sparsified_graph_.n_edges
            if kept <= target:
                best = d_max
            else:
                break
        return HybridSparsifier(d_max=best)
    if key == "apsp_greedy":
        return ApspGreedySparsifier(n_remove=n_remove, length_mode=length_mode)
    return make_sparsifier(key, n_remove=n_remove)


@dataclass(frozen=True)
class ComparisonCell:
    """One (graph, method, sparsity level) measurement."""

    graph_index: int
    method: str
    target_edges: int
    n_edges_final: int
    n_removed: int
    lambda2: float
    apsp_total: float
    connected: bool
    filtering_error: float
    seconds: float
    removed: frozenset = field(repr=False, compare=False, default=frozenset())


CSV_COLUMNS = [
    "graph_index",
    "method",
    "target_edges",
    "n_edges_final",
    "n_removed",
    "lambda2",
    "apsp_total",
    "connected",
    "filtering_error",
    "seconds",
]


@dataclass
class ComparisonReport:
    """Cells plus aggregates; serializable as CSV (cells) and JSON (summary)."""

    methods: list[str]
    levels: list[int]
    n_graphs: int
    seed: int
    filter_coeffs: list[float] | None
    cells: list[ComparisonCell]
    overlap: dict  # (level, method_a, method_b) -> median Jaccard
    bracket_rates: list[dict] = field(default_factory=list)
    note: str = (
        "filtering_error measures how much a low-pass polynomial graph "
        "filter's output changes on the sparsified graph; it stands in for "
        "downstream graph-convolution error, which needs task data"
    )

    def cell(self, graph_index: int, method: str, level: int) -> ComparisonCell:
        for c in self.cells:
            if (
                c.graph_index == graph_index
                and c.method == method
                and c.target_edges == level
            ):
                return c
        raise KeyError((graph_index, method, level))

    def column(self, method: str, level: int, metric: str) -> list[float]:
        return [
            getattr(c, metric)
            for c in self.cells
            if c.method == method and c.target_edges == level
        ]

    def median(self, method: str, level: int, metric: str) -> float:
        return float(statistics.median(self.column(method, level, metric)))

    def summary(self) -> dict:
        out = {}
        for method in self.methods:
            for level in self.levels:
                vals = {
                    m: self.column(method, level, m)
                    for m in ("lambda2", "filtering_error", "apsp_total", "seconds")
                }
                finite_apsp = [v for v in vals["apsp_total"] if np.isfinite(v)]
                out[f"{method}@{level}"] = {
                    "lambda2_median": float(statistics.median(vals["lambda2"])),
                    "lambda2_mean": float(np.mean(vals["lambda2"])),
                    "lambda2_std": float(np.std(vals["lambda2"])),
                    "filtering_error_median": float(
                        statistics.median(vals["filtering_error"])
                    ),
                    "filtering_error_mean": float(np.mean(vals["filtering_error"])),
                    "apsp_total_median_finite": (
                        float(statistics.median(finite_apsp)) if finite_apsp else None
                    ),
                    "connected_fraction": float(
                        np.mean(self.column(method, level, "connected"))
                    ),
                    "seconds_median": float(statistics.median(vals["seconds"])),
                }
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for c in self.cells:
                writer.writerow([getattr(c, col) for col in CSV_COLUMNS])

    def to_dict(self) -> dict:
        return {
            "note": self.note,
            "methods": self.methods,
            "levels": self.levels,
            "n_graphs": self.n_graphs,
            "seed": self.seed,
            "filter_coeffs": self.filter_coeffs,
            "summary": self.summary(),
            "overlap": [
                {
                    "target_edges": level,
                    "method_a": a,
                    "method_b": b,
                    "median_jaccard": val,
                }
                for (level, a, b), val in sorted(self.overlap.items())
            ],
            "bound_bracket_rates": self.bracket_rates,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _low_pass_coeffs(g: WeightedGraph, order: int = 3) -> np.ndarray:
    """Taps of (1 - L / lambda_max)^order for this graph: a smooth
    low-pass that keeps slow components and damps the rest."""
    lam_max = float(np.linalg.eigvalsh(laplacian_of(g))[-1])
    if lam_max <= 0:
        return np.array([1.0])
    # binomial expansion of (1 - x/lam_max)^order
    return np.array(
        [comb(order, p) * (-1.0 / lam_max) ** p for p in range(order + 1)]
    )


def run_comparison(
    graphs,
    methods,
    levels=None,
    n_signals: int = 8,
    filter_coeffs=None,
    filter_order: int = 10,
    signal_smoothing: int = 8,
    length_mode: str = "reciprocal",
    seed: int = 0,
    compute_bracket_rates: bool = True,
) -> ComparisonReport:
    """Run every method at every sparsity level on every graph.

    Levels are surviving-edge targets (default: four interior points
    between spanning-tree size and half the edges of the first graph).
    Each graph gets one fixed set of probe signals so methods are compared
    on identical inputs; everything is deterministic in `seed`.

    The default probes model what graph convolutions consume on a
    similarity graph: white noise smoothed by an order-`signal_smoothing`
    low pass of the FULL graph, then unit-normalized. Smooth probes plus a
    sharp order-`filter_order` low-pass filter make filtering_error track
    how well the sparse graph preserves the slow structure the graph
    exists to encode; white probes would instead reward whichever method
    perturbs the Laplacian least in raw norm. Passing `filter_coeffs`
    overrides the filter; `signal_smoothing=0` gives white probes.
    """
    graphs = [check_graph(g) for g in graphs]
    if not graphs:
        raise ValueError("need at least one graph")
    methods = [m.replace("-", "_") for m in methods]
    if not methods:
        raise ValueError("need at least one method")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {sorted(METHODS)}")
    if levels is None:
        levels = default_sparsity_levels(graphs[0])
    levels = sorted(int(v) for v in levels)

    rng = np.random.default_rng(seed)
    cells: list[ComparisonCell] = []
    bracket_rates: list[dict] = []
    for gi, g in enumerate(graphs):
        signals = rng.standard_normal((n_signals, g.n_nodes))
        if signal_smoothing > 0:
            L_full = laplacian_of(g)
            smoother = _low_pass_coeffs(g, signal_smoothing)
            signals = np.stack(
                [apply_filter(L_full, smoother, x) for x in signals]
            )
            norms = np.linalg.norm(signals, axis=1, keepdims=True)
            signals = signals / np.maximum(norms, 1e-300)
        coeffs = (
            check_coeffs(filter_coeffs)
            if filter_coeffs is not None
            else _low_pass_coeffs(g, filter_order)
        )
        if compute_bracket_rates and g.n_nodes <= 64:
            bracket_rates.append(bound_bracket_rate(g))
        for level in levels:
            target = min(level, g.n_edges)
            for method in methods:
                est = calibrate_sparsifier(method, g, target, length_mode=length_mode)
                t0 = time.perf_counter()
                est.fit(g)
                dt = time.perf_counter() - t0
                sparse = est.sparsified_graph_
                cells.append(
                    ComparisonCell(
                        graph_index=gi,
                        method=method,
                        target_edges=target,
                        n_edges_final=sparse.n_edges,
                        n_removed=len(est.removed_edges_),
                        lambda2=lambda2_of(sparse),
                        apsp_total=apsp_total(sparse, length_mode),
                        connected=is_connected(sparse),
                        filtering_error=filtering_error(g, sparse, coeffs, signals),
                        seconds=dt,
                        removed=frozenset(est.removed_edges_),
                    )
                )

    index = {(c.graph_index, c.method, c.target_edges): c for c in cells}
    overlap = {}
    for level in levels:
        for a in methods:
            for b in methods:
                vals = []
                for gi, g in enumerate(graphs):
                    target = min(level, g.n_edges)
                    ca = index[(gi, a, target)]
                    cb = index[(gi, b, target)]
                    vals.append(edge_overlap(ca.removed, cb.removed))
                overlap[(level, a, b)] = float(statistics.median(vals))

    return ComparisonReport(
        methods=methods,
        levels=levels,
        n_graphs=len(graphs),
        seed=seed,
        filter_coeffs=list(np.asarray(filter_coeffs, dtype=float)) if filter_coeffs is not None else None,
        cells=cells,
        overlap=overlap,
        bracket_rates=bracket_rates,
    )


# ---------------------------------------------------------------------------
# Runtime scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimingRow:
    n_nodes: int
    n_edges: int
    n_remove: int
    exact_seconds: float
    fast_seconds: float

    @property
    def ratio(self) -> float:
        return self.exact_seconds / self.fast_seconds if self.fast_seconds > 0 else float("inf")


def timing_scaling(
    sizes,
    k_fraction: float = 0.25,
    repeats: int = 5,
    warmup: int = 1,
    seed: int = 0,
    tol: float = 1e-8,
) -> list[TimingRow]:
    """Wall-time comparison of exact vs fast greedy on complete graphs.

    One complete kernel graph per size; both methods remove the same
    budget (`k_fraction` of the edges). Reported times are medians over
    `repeats` runs after `warmup` discarded runs.
    """
    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    if not 0 <= k_fraction <= 1:
        raise ValueError(f"k_fraction must be in [0, 1], got {k_fraction!r}")
    rows = []
    for n in sizes:
        g = make_ensemble(1, n_nodes=n, seed=seed + n)[0]
        budget = int(round(k_fraction * g.n_edges))

        def once(est_cls):
            t0 = time.perf_counter()
            est_cls(n_remove=budget, tol=tol).fit(g)
            return time.perf_counter() - t0

        for _ in range(warmup):
            once(FiedlerExactSparsifier)
            once(FiedlerFastSparsifier)
        exact = statistics.median(once(FiedlerExactSparsifier) for _ in range(repeats))
        fast = statistics.median(once(FiedlerFastSparsifier) for _ in range(repeats))
        rows.append(
            TimingRow(
                n_nodes=n,
                n_edges=g.n_edges,
                n_remove=budget,
                exact_seconds=exact,
                fast_seconds=fast,
            )
        )
    return rows
