"""Acceptance suite: one test per criterion, tolerances pinned.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion with the measured values. Budgets are generous on a
laptop-class machine; the slow entries are the greedy-method benchmarks.
"""

import json
import statistics
import time
import warnings

import numpy as np

from lapsparse import (
    ApspGreedySparsifier,
    EpsilonSparsifier,
    FiedlerExactSparsifier,
    FiedlerFastSparsifier,
    HybridSparsifier,
    KnnSparsifier,
    bridges,
    calibrate_sparsifier,
    degree_sequence,
    edge_overlap,
    fiedler_pair,
    is_connected,
    laplacian_of,
    load_graph,
    make_ensemble,
    perturbation_matrix,
    perturbation_score,
    run_comparison,
    save_graph,
    timing_scaling,
)
from lapsparse.cli import main as cli_main
from helpers import random_connected_graph, random_graph


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_1_removal_matches_perturbation_matrix():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    while checked < 200:
        n = int(rng.integers(2, 13))
        g = random_graph(n, rng, p=float(rng.uniform(0.3, 1.0)), w_lo=0.01, w_hi=1.0)
        if g.n_edges == 0:
            continue
        edges = g.edges()
        i, j, w = edges[int(rng.integers(len(edges)))]
        lhs = laplacian_of(g.remove_edge(i, j))
        rhs = laplacian_of(g) + perturbation_matrix(i, j, w, n)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        checked += 1
    elapsed = time.perf_counter() - t0
    report(
        1,
        "edge removal equals Laplacian plus perturbation matrix",
        worst <= 1e-14 and elapsed < 5.0,
        f"200 graphs, worst entrywise deviation {worst:.2e} (tol 1e-14), {elapsed:.2f}s",
    )


def test_criterion_2_eigenvalue_interval_brackets_perturbed_spectrum():
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    worst = -np.inf
    n_edges = 0
    for _ in range(50):
        g = random_connected_graph(int(rng.integers(3, 11)), rng, w_lo=0.05, w_hi=2.0)
        L = laplacian_of(g)
        vals, vecs = np.linalg.eigh(L)
        lam2, v2 = float(vals[1]), vecs[:, 1]
        for i, j, w in g.edges():
            score = perturbation_score(i, j, w, v2)
            tilde = np.linalg.eigvalsh(L + perturbation_matrix(i, j, w, g.n_nodes))
            excess = float(np.min(np.abs(tilde - lam2)) - score)
            worst = max(worst, excess)
            n_edges += 1
    elapsed = time.perf_counter() - t0
    report(
        2,
        "perturbed spectrum has an eigenvalue inside [lambda2 +- score]",
        worst <= 1e-9 and elapsed < 30.0,
        f"{n_edges} edges over 50 graphs, worst interval excess {worst:.2e} (tol 1e-9), {elapsed:.1f}s",
    )


def test_criterion_3_score_closed_form():
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        m, j = (int(v) for v in rng.choice(n, size=2, replace=False))
        w = float(rng.uniform(0.0, 5.0))
        v = rng.standard_normal(n)
        direct = perturbation_score(m, j, w, v)
        brute = float(np.linalg.norm(perturbation_matrix(m, j, w, n) @ v))
        worst = max(worst, abs(direct - brute))
    elapsed = time.perf_counter() - t0
    report(
        3,
        "closed-form score equals materialized matrix-vector norm",
        worst <= 1e-12 and elapsed < 1.0,
        f"1000 cases, worst deviation {worst:.2e} (tol 1e-12), {elapsed:.2f}s",
    )


def test_criterion_4_exact_greedy_matches_bruteforce_argmin():
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    mismatches = 0
    steps = 0
    for _ in range(50):
        g = random_connected_graph(int(rng.integers(4, 9)), rng)
        budget = max(1, g.n_edges // 2)
        trace = FiedlerExactSparsifier(n_remove=budget).fit(g).trace_
        current = g
        for rec in trace.removed:
            L = laplacian_of(current)
            lam = float(np.linalg.eigvalsh(L)[1])
            blocked = bridges(current)
            best = None
            for i, j, w in current.edges():
                if (i, j) in blocked:
                    continue
                tilde = float(
                    np.linalg.eigvalsh(
                        L + perturbation_matrix(i, j, w, current.n_nodes)
                    )[1]
                )
                key = (abs(tilde - lam), i, j)
                if best is None or key < best:
                    best = key
            if rec.edge != (best[1], best[2]):
                mismatches += 1
            steps += 1
            current = current.remove_edge(*rec.edge)
    elapsed = time.perf_counter() - t0
    report(
        4,
        "exact greedy choice equals brute-force argmin each step",
        mismatches == 0 and elapsed < 60.0,
        f"{steps} steps over 50 graphs, {mismatches} mismatches, {elapsed:.1f}s",
    )


def test_criterion_5_iterative_solver_accuracy():
    rng = np.random.default_rng(105)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(4, 201))
        g = random_connected_graph(n, rng)
        L = laplacian_of(g)
        ref = float(np.linalg.eigvalsh(L)[1])
        got = fiedler_pair(L).value
        worst = max(worst, abs(got - ref) / ref)
    elapsed = time.perf_counter() - t0
    report(
        5,
        "iterative solver matches dense oracle",
        worst <= 1e-6 and elapsed < 60.0,
        f"100 connected graphs n in [4, 200], worst relative error {worst:.2e} (tol 1e-6), {elapsed:.1f}s",
    )


def test_criterion_6_exact_and_fast_choose_similar_edges():
    t0 = time.perf_counter()
    graphs = make_ensemble(20, 11, seed=0)
    budget = round(0.4 * graphs[0].n_edges)
    exact_fast, fast_eps = [], []
    for g in graphs:
        exact = FiedlerExactSparsifier(n_remove=budget).fit(g)
        fast = FiedlerFastSparsifier(n_remove=budget).fit(g)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            eps = calibrate_sparsifier("epsilon", g, g.n_edges - budget).fit(g)
        a = set(exact.removed_edges_)
        b = set(fast.removed_edges_)
        c = set(eps.removed_edges_)
        exact_fast.append(edge_overlap(a, b))
        fast_eps.append(edge_overlap(b, c))
    med_ef = statistics.median(exact_fast)
    med_fe = statistics.median(fast_eps)
    elapsed = time.perf_counter() - t0
    report(
        6,
        "removal-set agreement between exact and fast greedy",
        med_ef >= 0.70 and med_fe < med_ef and elapsed < 120.0,
        f"median Jaccard exact/fast {med_ef:.3f} (floor 0.70), "
        f"fast/epsilon {med_fe:.3f} (must be lower), K={budget} of "
        f"{graphs[0].n_edges}, {elapsed:.1f}s",
    )


def test_criterion_7_quality_ordering_across_levels():
    t0 = time.perf_counter()
    graphs = make_ensemble(20, 11, seed=0)
    methods = ["knn", "epsilon", "hybrid", "apsp_greedy", "fiedler_exact", "fiedler_fast"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = run_comparison(graphs, methods, seed=0)
    failures = []
    for level in rep.levels:
        lam = {m: rep.median(m, level, "lambda2") for m in methods}
        if not all(lam["fiedler_exact"] >= lam[m] - 1e-12 for m in methods):
            failures.append(f"lambda2 not top at level {level}: {lam}")
        fe = {m: rep.median(m, level, "filtering_error") for m in ("knn", "epsilon", "fiedler_exact")}
        if not (fe["fiedler_exact"] <= fe["knn"] and fe["fiedler_exact"] <= fe["epsilon"]):
            failures.append(f"filtering_error not lowest at level {level}: {fe}")
    elapsed = time.perf_counter() - t0
    report(
        7,
        "exact greedy keeps highest connectivity and lowest filtering error",
        not failures and elapsed < 300.0,
        f"levels {rep.levels}, all comparisons in ensemble median, {elapsed:.0f}s"
        + ("" if not failures else f"; failures: {failures}"),
    )


def test_criterion_8_runtime_scaling_direction():
    t0 = time.perf_counter()
    rows = timing_scaling([20, 40, 80], k_fraction=0.25, repeats=1, warmup=0, seed=0)
    ratios = [r.ratio for r in rows]
    monotone = all(a < b for a, b in zip(ratios, ratios[1:]))
    elapsed = time.perf_counter() - t0
    detail = "; ".join(
        f"n={r.n_nodes}: exact {r.exact_seconds:.2f}s fast {r.fast_seconds:.2f}s ratio {r.ratio:.1f}"
        for r in rows
    )
    soft = ratios[-1] >= 5.0
    report(
        8,
        "exact/fast runtime ratio grows with graph size",
        monotone and elapsed < 600.0,
        f"{detail}; soft floor ratio>=5 at n=80: {'met' if soft else 'NOT met'}, {elapsed:.0f}s",
    )


def test_criterion_9_invariant_battery(tmp_path):
    t0 = time.perf_counter()
    problems = []
    rng = np.random.default_rng(109)

    # greedy traces: lambda2 never increases, connectivity preserved
    for seed in range(4):
        g = make_ensemble(1, 10, seed=seed)[0]
        budget = g.n_edges // 2
        for est in (
            FiedlerExactSparsifier(n_remove=budget),
            FiedlerFastSparsifier(n_remove=budget),
            ApspGreedySparsifier(n_remove=budget),
        ):
            est.fit(g)
            if not is_connected(est.sparsified_graph_):
                problems.append(f"{est._method} disconnected output (seed {seed})")
            lams = []
            current = g
            for i, j in est.removed_edges_:
                current = current.remove_edge(i, j)
                lams.append(float(np.linalg.eigvalsh(laplacian_of(current))[1]))
            if any(b > a + 1e-10 for a, b in zip(lams, lams[1:])):
                problems.append(f"{est._method} lambda2 series increased (seed {seed})")

    # knn minimum degree
    for _ in range(5):
        g = random_connected_graph(int(rng.integers(4, 11)), rng)
        k = int(rng.integers(1, 4))
        before, _ = degree_sequence(g)
        after, _ = degree_sequence(KnnSparsifier(k=k).fit(g).sparsified_graph_)
        if any(a < min(k, b) for a, b in zip(after, before)):
            problems.append("knn violated min-degree")

    # epsilon strictness
    for _ in range(5):
        g = random_connected_graph(8, rng)
        eps = float(rng.uniform(0.1, 1.5))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sg = EpsilonSparsifier(eps=eps).fit(g).sparsified_graph_
        if any(w < eps for _, _, w in sg.edges()):
            problems.append("epsilon kept an edge below threshold")

    # hybrid degree bounds
    for _ in range(5):
        g = random_connected_graph(9, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sg = HybridSparsifier(d_max=3, d_min=2, eps=0.5).fit(g).sparsified_graph_
        before, _ = degree_sequence(g)
        after, _ = degree_sequence(sg)
        if any(a < min(2, b) for a, b in zip(after, before)):
            problems.append("hybrid violated degree floor")

    # CLI round trip and determinism
    g = make_ensemble(1, 11, seed=99)[0]
    src = tmp_path / "g.edges"
    save_graph(g, src)
    if load_graph(src) != g:
        problems.append("save/load round trip not exact")
    outputs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.edges"
        trace = tmp_path / f"{tag}.json"
        code = cli_main(
            ["sparsify", "--input", str(src), "--output", str(out),
             "--method", "fiedler-fast", "-K", "15", "--trace", str(trace)]
        )
        if code != 0:
            problems.append("CLI sparsify exited nonzero")
        payload = json.loads(trace.read_text())
        payload.pop("seconds")
        for rec in payload["removed"]:
            rec.pop("seconds")
        outputs.append((out.read_bytes(), payload))
    if outputs[0] != outputs[1]:
        problems.append("CLI output not deterministic")

    elapsed = time.perf_counter() - t0
    report(
        9,
        "invariant battery (traces, guards, degree bounds, CLI determinism)",
        not problems and elapsed < 60.0,
        f"{elapsed:.1f}s" + ("" if not problems else f"; problems: {problems}"),
    )
