"""Reading and writing graphs.

Two formats:

* edge-list text (primary, human-diffable): a header line ``n=<N>``
  followed by one ``i j w`` triple per line, 0-based indices, ``#``
  comments allowed anywhere;
* symmetric coordinate matrix files (interchange with linear-algebra
  tools): ``%%MatrixMarket matrix coordinate real symmetric`` header,
  a ``N N M`` size line, then 1-based lower-triangle entries.

Weights are serialized with ``repr`` so a load/save round trip is exact.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .exceptions import (
    DuplicateEdgeError,
    IndexOutOfRangeError,
    IoError,
    NegativeWeightError,
    ParseError,
    SelfLoopError,
)
from .graph import WeightedGraph, build_graph

_MM_HEADER = "%%MatrixMarket matrix coordinate real symmetric"


def _significant_lines(text: str):
    """Yield (line_number, payload) with comments and blanks stripped."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_edge_line(lineno: int, line: str, n: int, seen: dict) -> tuple[int, int, float]:
    parts = line.split()
    if len(parts) != 3:
        raise ParseError(f"line {lineno}: expected 'i j w', got {line!r}")
    try:
        i, j = int(parts[0]), int(parts[1])
        w = float(parts[2])
    except ValueError:
        raise ParseError(f"line {lineno}: expected 'i j w', got {line!r}") from None
    if not 0 <= i < n or not 0 <= j < n:
        raise IndexOutOfRangeError(
            f"line {lineno}: node index outside [0, {n}) in {line!r}"
        )
    if i == j:
        raise SelfLoopError(f"line {lineno}: self-loop ({i}, {i})")
    if w < 0:
        raise NegativeWeightError(f"line {lineno}: negative weight {w!r}")
    key = (i, j) if i < j else (j, i)
    if key in seen:
        raise DuplicateEdgeError(
            f"line {lineno}: edge {key} already given on line {seen[key]}"
        )
    seen[key] = lineno
    return i, j, w


def loads_graph(text: str) -> WeightedGraph:
    """Parse a graph from edge-list text."""
    lines = iter(_significant_lines(text))
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("line 1: empty file, expected 'n=<N>' header") from None
    if not header.startswith("n="):
        raise ParseError(f"line {lineno}: expected 'n=<N>' header, got {header!r}")
    try:
        n = int(header[2:])
    except ValueError:
        raise ParseError(f"line {lineno}: bad node count in {header!r}") from None
    if n < 1:
        raise ParseError(f"line {lineno}: node count must be positive, got {n}")
    seen: dict = {}
    edges = [_parse_edge_line(lineno, line, n, seen) for lineno, line in lines]
    return build_graph(n, edges)


def dumps_graph(g: WeightedGraph) -> str:
    """Serialize to edge-list text with full weight precision."""
    out = [f"n={g.n_nodes}"]
    out.extend(f"{i} {j} {w!r}" for i, j, w in g.edges())
    return "\n".join(out) + "\n"


def _loads_coordinate(text: str) -> WeightedGraph:
    lines = _significant_lines(text.replace("%%MatrixMarket", "#", 1))
    stripped = [
        (lineno, line.split("%", 1)[0].strip())
        for lineno, line in lines
        if line.split("%", 1)[0].strip()
    ]
    if not stripped:
        raise ParseError("line 1: empty coordinate file")
    lineno, size = stripped[0]
    parts = size.split()
    if len(parts) != 3:
        raise ParseError(f"line {lineno}: expected 'N N M' size line, got {size!r}")
    try:
        rows, cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"line {lineno}: bad size line {size!r}") from None
    if rows != cols:
        raise ParseError(f"line {lineno}: matrix must be square, got {rows}x{cols}")
    seen: dict = {}
    edges = []
    for lineno, line in stripped[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'i j w' entry, got {line!r}")
        try:
            r, c = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: bad entry {line!r}") from None
        if not 1 <= r <= rows or not 1 <= c <= cols:
            raise IndexOutOfRangeError(
                f"line {lineno}: 1-based index outside [1, {rows}] in {line!r}"
            )
        if r == c:
            if w != 0:
                raise SelfLoopError(f"line {lineno}: nonzero diagonal entry")
            continue
        key = (min(r, c) - 1, max(r, c) - 1)
        if key in seen:
            raise DuplicateEdgeError(
                f"line {lineno}: entry for {key} already given on line {seen[key]}"
            )
        seen[key] = lineno
        edges.append((key[0], key[1], w))
    if len(seen) != nnz:
        raise ParseError(f"size line declared {nnz} entries, found {len(seen)}")
    return build_graph(rows, edges)


def _dumps_coordinate(g: WeightedGraph) -> str:
    out = [_MM_HEADER, f"{g.n_nodes} {g.n_nodes} {g.n_edges}"]
    # lower triangle: row index > column index, 1-based
    out.extend(f"{j + 1} {i + 1} {w!r}" for i, j, w in g.edges())
    return "\n".join(out) + "\n"


def load_graph(path) -> WeightedGraph:
    """Load a graph, picking the format from the extension/header."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".mtx" or text.lstrip().startswith("%%MatrixMarket"):
        return _loads_coordinate(text)
    return loads_graph(text)


def save_graph(g: WeightedGraph, path) -> None:
    """Write a graph; ``.mtx`` paths get the coordinate format."""
    path = Path(path)
    text = _dumps_coordinate(g) if path.suffix.lower() == ".mtx" else dumps_graph(g)
    try:
        path.write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def sample_graph_path() -> Path:
    """Path of the bundled 11-node complete kernel graph."""
    with resources.as_file(resources.files("lapsparse").joinpath("data/sample11.edges")) as p:
        return Path(p)


def load_sample_graph() -> WeightedGraph:
    """The bundled 11-node complete graph with Gaussian-kernel weights."""
    return load_graph(sample_graph_path())
