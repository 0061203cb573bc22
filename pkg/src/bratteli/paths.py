"""Generators for long paths in Pascal graphs, plus explicit path files.

A path spec is one of

* ``freq:p/q``: the vertex on level ``n`` is ``(floor(p n / q), n - floor(p n / q))``;
* ``oscillate:a,b,blocklen``: blocks of length ``blocklen * 2**k``; inside the
  ``k``-th block the first coordinate grows with frequency ``a`` for even ``k``
  and ``b`` for odd ``k``;
* ``file:PATH``: a JSON list with one entry per level, each a vertex label or
  an integer index.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .graph import BoundsError, GradedGraph, VertexRef
from .measures import FinitePath, PathError


def _pascal_path(graph: GradedGraph, firsts: list[int]) -> FinitePath:
    dim = len(graph.label(VertexRef(0, 0)))
    if not graph.name.startswith("pascal:"):
        raise PathError("frequency paths are defined on Pascal graphs only")
    verts = []
    for n, k in enumerate(firsts):
        label = (k, n - k) + (0,) * (dim - 2)
        verts.append(graph.index_of(n, label))
    return FinitePath.on(graph, verts)


def freq_path(graph: GradedGraph, p: Fraction, depth: int) -> FinitePath:
    """Path whose first coordinate on level ``n`` is ``floor(p n)``."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise BoundsError(f"frequency {p} outside [0, 1]")
    if depth > graph.depth:
        raise BoundsError(f"depth {depth} exceeds graph depth {graph.depth}")
    return _pascal_path(graph, [int(p * n) for n in range(depth + 1)])


def oscillating_path(graph: GradedGraph, a: Fraction, b: Fraction, blocklen: int, depth: int) -> FinitePath:
    """Path whose step frequency alternates between ``a`` and ``b`` on doubling blocks."""
    a, b = Fraction(a), Fraction(b)
    if not (0 <= a <= 1 and 0 <= b <= 1) or blocklen < 1:
        raise BoundsError("oscillate needs frequencies in [0, 1] and blocklen >= 1")
    if depth > graph.depth:
        raise BoundsError(f"depth {depth} exceeds graph depth {graph.depth}")
    firsts = [0]
    block, start, base = 0, 0, 0
    length = blocklen
    for n in range(1, depth + 1):
        if n - start > length:
            base = firsts[-1]
            start = n - 1
            block += 1
            length = blocklen * 2**block
        freq = a if block % 2 == 0 else b
        firsts.append(base + int(freq * (n - start)))
    return _pascal_path(graph, firsts)


def file_path(graph: GradedGraph, path: str | Path, depth: int | None = None) -> FinitePath:
    """Read a path file, keeping levels ``0..depth`` when ``depth`` is given."""
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(entries, list) or not entries:
        raise PathError("a path file must hold a non-empty JSON list")
    if depth is not None:
        entries = entries[: depth + 1]
    verts = []
    for n, entry in enumerate(entries):
        if isinstance(entry, int) and not isinstance(entry, bool):
            verts.append(VertexRef(n, entry))
        else:
            verts.append(graph.index_of(n, entry))
    return FinitePath.on(graph, verts)


def parse_path_spec(graph: GradedGraph, spec: str, depth: int) -> FinitePath:
    kind, _, arg = spec.partition(":")
    if kind == "freq":
        return freq_path(graph, Fraction(arg), depth)
    if kind == "oscillate":
        parts = arg.split(",")
        if len(parts) != 3:
            raise PathError("oscillate expects a,b,blocklen")
        return oscillating_path(graph, Fraction(parts[0]), Fraction(parts[1]), int(parts[2]), depth)
    if kind == "file":
        found = file_path(graph, arg, depth)
        if found.length < depth:
            raise PathError(f"path file has {found.length} steps, fewer than depth {depth}")
        return found
    raise PathError(f"unknown path spec {spec!r}; use freq:, oscillate: or file:")
