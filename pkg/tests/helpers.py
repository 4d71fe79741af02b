"""Shared generators for randomized tests."""

from __future__ import annotations

import numpy as np

from lapsparse import build_graph, is_connected


def random_graph(n, rng, p=None, w_lo=0.05, w_hi=2.0):
    """Erdos-Renyi-style weighted graph; may be disconnected."""
    if p is None:
        p = min(1.0, 2.5 * np.log(max(n, 2)) / max(n - 1, 1))
    edges = [
        (i, j, float(rng.uniform(w_lo, w_hi)))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return build_graph(n, edges)


def random_connected_graph(n, rng, p=None, w_lo=0.05, w_hi=2.0):
    """Random weighted graph, redrawn until connected."""
    while True:
        g = random_graph(n, rng, p=p, w_lo=w_lo, w_hi=w_hi)
        if g.n_edges and is_connected(g):
            return g
