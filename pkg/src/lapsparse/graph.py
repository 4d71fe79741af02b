"""Weighted undirected graphs and their combinatorial Laplacians.

The graph is the object that gets sparsified: symmetric nonnegative
weights, no self-loops, node indices in [0, n). Zero-weight edges are
canonicalized to absence, so ``W[i, j] == 0`` always means "no edge".
Instances are immutable; mutation helpers return new graphs.
"""

from __future__ import annotations

import math
import warnings
from typing import Iterable

import numpy as np

from .exceptions import (
    DegenerateFeaturesWarning,
    DuplicateEdgeError,
    EdgeNotFoundError,
    IndexOutOfRangeError,
    NegativeWeightError,
    SelfLoopError,
)

Edge = tuple[int, int]


def _canonical(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


class WeightedGraph:
    """Undirected graph with nonnegative edge weights and no self-loops.

    Edges are stored once each under the canonical ordering ``i < j``,
    which makes the symmetry of the adjacency matrix unrepresentable-wrong.
    """

    __slots__ = ("n_nodes", "_weights", "_arrays", "_neighbors")

    def __init__(self, n_nodes: int, edges: Iterable[tuple[int, int, float]] = ()):
        n = int(n_nodes)
        if n < 1:
            raise ValueError(f"node count must be positive, got {n_nodes!r}")
        weights: dict[Edge, float] = {}
        for i, j, w in edges:
            i, j, w = int(i), int(j), float(w)
            if not 0 <= i < n or not 0 <= j < n:
                raise IndexOutOfRangeError(
                    f"edge ({i}, {j}) has a node index outside [0, {n})"
                )
            if i == j:
                raise SelfLoopError(f"self-loop ({i}, {i}) is not allowed")
            if not (w >= 0.0) or not math.isfinite(w):
                raise NegativeWeightError(
                    f"edge ({i}, {j}) needs a finite nonnegative weight, got {w!r}"
                )
            key = _canonical(i, j)
            if key in weights:
                raise DuplicateEdgeError(f"edge {key} supplied more than once")
            if w > 0.0:  # zero weight == absent edge
                weights[key] = w
        self.n_nodes = n
        # keys kept in lexicographic order so edges() never re-sorts;
        # mutation helpers preserve the order
        self._weights = dict(sorted(weights.items()))
        self._arrays = None
        self._neighbors = None

    @classmethod
    def _from_weights(cls, n_nodes: int, weights: dict[Edge, float]) -> "WeightedGraph":
        """Trusted constructor: `weights` must already be canonical, with
        keys in lexicographic order."""
        g = object.__new__(cls)
        g.n_nodes = n_nodes
        g._weights = weights
        g._arrays = None
        g._neighbors = None
        return g

    @property
    def n_edges(self) -> int:
        return len(self._weights)

    def edges(self) -> list[tuple[int, int, float]]:
        """All edges as (i, j, weight) triples in lexicographic order."""
        return [(i, j, w) for (i, j), w in self._weights.items()]

    def edge_set(self) -> set[Edge]:
        return set(self._weights)

    def has_edge(self, i: int, j: int) -> bool:
        return _canonical(i, j) in self._weights

    def weight(self, i: int, j: int) -> float:
        """Weight of edge (i, j), or 0.0 if the edge is absent."""
        return self._weights.get(_canonical(i, j), 0.0)

    def neighbors(self) -> list[list[int]]:
        """Adjacency-list view backing graph traversals.

        Cached (the graph is immutable); treat the returned lists as
        read-only.
        """
        if self._neighbors is None:
            adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
            for i, j in self._weights:
                adj[i].append(j)
                adj[j].append(i)
            self._neighbors = adj
        return self._neighbors

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix W."""
        W = np.zeros((self.n_nodes, self.n_nodes))
        for (i, j), w in self._weights.items():
            W[i, j] = w
            W[j, i] = w
        return W

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edges as parallel (i, j, w) arrays, lexicographically ordered.

        Cached (the graph is immutable); treat the arrays as read-only.
        """
        if self._arrays is None:
            triples = self.edges()
            if not triples:
                self._arrays = (
                    np.empty(0, dtype=int),
                    np.empty(0, dtype=int),
                    np.empty(0),
                )
            else:
                ii, jj, ww = zip(*triples)
                self._arrays = (
                    np.array(ii, dtype=int),
                    np.array(jj, dtype=int),
                    np.array(ww),
                )
        return self._arrays

    def remove_edge(self, i: int, j: int) -> "WeightedGraph":
        """New graph with edge (i, j) deleted; raises if it is absent."""
        key = _canonical(int(i), int(j))
        if key not in self._weights:
            raise EdgeNotFoundError(f"edge {key} not present")
        weights = dict(self._weights)
        del weights[key]
        out = WeightedGraph._from_weights(self.n_nodes, weights)
        if self._arrays is not None:
            # derive the child's cache instead of rebuilding it from the dict
            ii, jj, ww = self._arrays
            keep = ~((ii == key[0]) & (jj == key[1]))
            out._arrays = (ii[keep], jj[keep], ww[keep])
        if self._neighbors is not None:
            adj = list(self._neighbors)  # untouched rows stay shared
            adj[key[0]] = [v for v in adj[key[0]] if v != key[1]]
            adj[key[1]] = [v for v in adj[key[1]] if v != key[0]]
            out._neighbors = adj
        return out

    def add_edge(self, i: int, j: int, w: float) -> "WeightedGraph":
        """New graph with edge (i, j, w) inserted; raises on duplicates."""
        i, j, w = int(i), int(j), float(w)
        if i == j:
            raise SelfLoopError(f"self-loop ({i}, {i}) is not allowed")
        if not 0 <= i < self.n_nodes or not 0 <= j < self.n_nodes:
            raise IndexOutOfRangeError(f"edge ({i}, {j}) outside [0, {self.n_nodes})")
        if not (w >= 0.0) or not math.isfinite(w):
            raise NegativeWeightError(f"weight must be finite nonnegative, got {w!r}")
        key = _canonical(i, j)
        if key in self._weights:
            raise DuplicateEdgeError(f"edge {key} already present")
        weights = dict(self._weights)
        if w > 0.0:
            weights[key] = w
            weights = dict(sorted(weights.items()))
        return WeightedGraph._from_weights(self.n_nodes, weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and self._weights == other._weights

    def __hash__(self):
        return hash((self.n_nodes, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def build_graph(n_nodes: int, edge_list: Iterable[tuple[int, int, float]]) -> WeightedGraph:
    """Validate an edge list and return the canonical graph.

    Duplicates (in either orientation), self-loops, negative or non-finite
    weights and out-of-range indices are rejected; zero-weight edges are
    dropped.
    """
    return WeightedGraph(n_nodes, edge_list)


def complete_graph_from_kernel(features, bandwidth: float) -> WeightedGraph:
    """Complete graph with Gaussian-kernel weights over feature rows.

    Weight of edge (i, j) is ``exp(-||f_i - f_j||^2 / bandwidth^2)``, so
    all weights lie in (0, 1]. The kernel and bandwidth are configuration:
    nothing downstream assumes how a complete graph's weights were made.
    """
    F = np.asarray(features, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    if F.ndim != 2 or F.shape[0] < 2:
        raise ValueError("features must be at least 2 rows of equal-length vectors")
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
    n = F.shape[0]
    if np.all(F == F[0]):
        warnings.warn(
            "all feature rows are identical; every weight is 1",
            DegenerateFeaturesWarning,
            stacklevel=2,
        )
    sq = np.sum((F[:, None, :] - F[None, :, :]) ** 2, axis=-1)
    W = np.exp(-sq / bandwidth**2)
    edges = [(i, j, W[i, j]) for i in range(n) for j in range(i + 1, n)]
    return WeightedGraph(n, edges)


def laplacian_of(g: WeightedGraph) -> np.ndarray:
    """Combinatorial Laplacian L = D - W as a dense array."""
    W = g.adjacency_matrix()
    return np.diag(W.sum(axis=1)) - W


def remove_edge(g: WeightedGraph, i: int, j: int) -> WeightedGraph:
    """New graph without edge (i, j); the Laplacian changes by the
    four-entry perturbation matrix for that edge."""
    return g.remove_edge(i, j)


def degree_sequence(g: WeightedGraph) -> tuple[list[int], list[float]]:
    """Per-node (edge counts, weighted degrees D_ii)."""
    counts = [0] * g.n_nodes
    weighted = [0.0] * g.n_nodes
    for (i, j), w in g._weights.items():
        counts[i] += 1
        counts[j] += 1
        weighted[i] += w
        weighted[j] += w
    return counts, weighted


def is_connected(g: WeightedGraph) -> bool:
    """True iff a traversal from node 0 reaches every node."""
    n = g.n_nodes
    if n == 1:
        return True
    adj = g.neighbors()
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == n


def removal_keeps_connected(adj: list[list[int]], i: int, j: int) -> bool:
    """Would nodes i and j stay connected if edge (i, j) were removed?

    Early-exit search from i toward j that refuses to take the direct
    edge. Equivalent to "(i, j) is not a bridge", but on well-connected
    graphs it terminates after a couple of hops, so greedy loops can test
    only the candidates they are about to pick instead of running a full
    bridge pass per round.
    """
    seen = bytearray(len(adj))
    seen[i] = 1
    stack = [i]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if u == i and v == j:
                continue  # the edge under test; simple graph, so it is unique
            if v == j:
                return True
            if not seen[v]:
                seen[v] = 1
                stack.append(v)
    return False


def bridges(g: WeightedGraph) -> set[Edge]:
    """All bridge edges: removing any one of them splits its component.

    Iterative lowlink DFS, so deep graphs do not hit the recursion limit.
    """
    n = g.n_nodes
    adj = g.neighbors()
    disc = [-1] * n
    low = [0] * n
    out: set[Edge] = set()
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        # stack holds (node, parent, iterator over neighbors)
        stack = [(root, -1, iter(adj[root]))]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for v in it:
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, u, iter(adj[v])))
                    advanced = True
                    break
                elif v != parent:
                    low[u] = min(low[u], disc[v])
                # v == parent: the single tree edge back up, skipped
                # (simple graph, so no parallel edges to worry about)
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        out.add(_canonical(p, u))
    return out
