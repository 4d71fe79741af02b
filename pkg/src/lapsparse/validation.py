"""Input validation helpers shared by the estimators and functional API."""

from __future__ import annotations

import numpy as np

from .exceptions import BudgetExceedsEdgesError, DimensionMismatchError


def check_graph(graph):
    """Return `graph` if it is a WeightedGraph, else raise TypeError."""
    from .graph import WeightedGraph

    if not isinstance(graph, WeightedGraph):
        raise TypeError(
            f"expected a WeightedGraph, got {type(graph).__name__}; "
            "build one with build_graph() or load_graph()"
        )
    return graph


def check_laplacian(L) -> np.ndarray:
    """Coerce to a square 2-D float array; raise on anything else."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {L.shape}")
    return L


def check_signal(x, n_nodes: int) -> np.ndarray:
    """Coerce a node signal to a float vector of length `n_nodes`."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != n_nodes:
        raise DimensionMismatchError(
            f"signal must be a vector of length {n_nodes}, got shape {x.shape}"
        )
    return x


def check_coeffs(coeffs) -> np.ndarray:
    """Coerce polynomial filter taps to a finite 1-D float array."""
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if a.ndim != 1 or a.size == 0:
        raise ValueError("filter coefficients must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(a)):
        raise ValueError("filter coefficients must be finite")
    return a


def check_removal_budget(n_remove, n_edges: int) -> int:
    """Validate an edge-removal budget against the current edge count."""
    k = int(n_remove)
    if k != n_remove or k < 0:
        raise ValueError(f"n_remove must be a nonnegative integer, got {n_remove!r}")
    if k > n_edges:
        raise BudgetExceedsEdgesError(
            f"cannot remove {k} edges from a graph with {n_edges}"
        )
    return k


def check_positive_int(value, name: str) -> int:
    k = int(value)
    if k != value or k < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return k
