"""Exact path counting on graded graphs.

All counts are Python integers and all ratios are :class:`fractions.Fraction`.
Level vectors of counts are numpy ``object`` arrays so the per-level sums run
through ``np.add.reduceat`` while staying arbitrary precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterator, Mapping

import numpy as np

from .graph import BoundsError, BratteliError, GradedGraph, VertexRef


class MeasureError(BratteliError, ValueError):
    """A measure is malformed (non-positive weight, bad normalisation, ...)."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure with exact rational weights.

    The support is kept sorted and duplicate free, and every stored weight is
    strictly positive; zero weights are dropped by :meth:`from_mapping`.
    """

    support: tuple[Hashable, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.support) != len(self.weights):
            raise MeasureError("support and weights differ in length")
        if not self.support:
            raise MeasureError("empty support")
        if any(w <= 0 for w in self.weights):
            raise MeasureError("weights must be positive")
        if sum(self.weights) != 1:
            raise MeasureError(f"weights sum to {sum(self.weights)}, not 1")
        if list(self.support) != sorted(set(self.support)):
            raise MeasureError("support must be sorted and free of duplicates")

    @classmethod
    def from_mapping(cls, weights: Mapping[Hashable, Any]) -> "DiscreteMeasure":
        items = sorted(((k, Fraction(w)) for k, w in weights.items() if w != 0), key=lambda kv: kv[0])
        return cls(tuple(k for k, _ in items), tuple(w for _, w in items))

    @classmethod
    def dirac(cls, point: Hashable) -> "DiscreteMeasure":
        return cls((point,), (Fraction(1),))

    def as_dict(self) -> dict[Hashable, Fraction]:
        return dict(zip(self.support, self.weights))

    def __getitem__(self, point: Hashable) -> Fraction:
        return self.as_dict().get(point, Fraction(0))

    def __iter__(self) -> Iterator[tuple[Hashable, Fraction]]:
        return iter(zip(self.support, self.weights))

    def __len__(self) -> int:
        return len(self.support)

    @property
    def level(self) -> int:
        """Common level of a measure supported on graph vertices."""
        levels = {p.level for p in self.support}
        if len(levels) != 1:
            raise MeasureError(f"support spans levels {sorted(levels)}")
        return levels.pop()


def dimension_vector(graph: GradedGraph, level: int) -> np.ndarray:
    """Object array of ``dim v`` for every vertex of ``level`` (memoised)."""
    if not 0 <= level <= graph.depth:
        raise BoundsError(f"level {level} outside 0..{graph.depth}")
    memo = graph._memo.setdefault("dims", [np.array([1], dtype=object)])
    while len(memo) <= level:
        n = len(memo)
        memo.append(push_forward(graph, n, memo[-1]))
    return memo[level]


def push_forward(graph: GradedGraph, n: int, counts: np.ndarray) -> np.ndarray:
    """Given path counts on level ``n - 1``, return counts on level ``n``.

    Works on 1-d vectors or on 2-d stacks (one row per source).
    """
    ptr, idx = graph.pred_table(n)
    gathered = counts[..., idx]
    return np.add.reduceat(gathered, ptr[:-1], axis=-1)


def dimensions(graph: GradedGraph, level: int) -> dict[VertexRef, int]:
    vec = dimension_vector(graph, level)
    return {VertexRef(level, i): int(d) for i, d in enumerate(vec)}


def dimension(graph: GradedGraph, v: VertexRef) -> int:
    graph.check_vertex(v)
    return int(dimension_vector(graph, v.level)[v.index])


def skew_vectors(graph: GradedGraph, u: VertexRef, up_to: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(n, counts)`` for ``n = level(u) .. up_to``.

    ``counts[j]`` is the number of paths from ``u`` to vertex ``j`` of level ``n``.
    """
    graph.check_vertex(u)
    if up_to < u.level or up_to > graph.depth:
        raise BoundsError(f"cannot count paths from level {u.level} to level {up_to}")
    vec = np.zeros(graph.level_size(u.level), dtype=object)
    vec[u.index] = 1
    yield u.level, vec
    for n in range(u.level + 1, up_to + 1):
        vec = push_forward(graph, n, vec)
        yield n, vec


def skew_dimension(graph: GradedGraph, u: VertexRef, v: VertexRef) -> int:
    """Number of paths from ``u`` up to ``v``; 0 if ``v`` is not reachable."""
    graph.check_vertex(v)
    if u.level > v.level:
        raise BoundsError(f"skew dimension needs level(u) <= level(v), got {u.level} > {v.level}")
    for n, vec in skew_vectors(graph, u, v.level):
        if n == v.level:
            return int(vec[v.index])
    raise AssertionError("unreachable")


def predecessor_distribution(graph: GradedGraph, v: VertexRef) -> DiscreteMeasure:
    """The measure ``w -> dim w / dim v`` on the predecessors of ``v``."""
    graph.check_vertex(v)
    if v.level == 0:
        raise BoundsError("the root has no predecessor distribution")
    dims = dimension_vector(graph, v.level - 1)
    total = dimension(graph, v)
    preds = graph.predecessors(v)
    return DiscreteMeasure(tuple(preds), tuple(Fraction(int(dims[w.index]), total) for w in preds))


def predecessor_weights(graph: GradedGraph, n: int) -> list[tuple[np.ndarray, list[Fraction]]]:
    """Per vertex of level ``n``: predecessor indices and exact weights (memoised)."""
    key = ("nu", n)
    if key not in graph._memo:
        ptr, idx = graph.pred_table(n)
        below = dimension_vector(graph, n - 1)
        here = dimension_vector(graph, n)
        table = []
        for i in range(len(ptr) - 1):
            row = idx[ptr[i] : ptr[i + 1]]
            table.append((row, [Fraction(int(below[j]), int(here[i])) for j in row]))
        graph._memo[key] = table
    return graph._memo[key]


def predecessor_weights_float(graph: GradedGraph, n: int) -> np.ndarray:
    """Flat float array of ``dim w / dim v`` aligned with ``pred_table(n)[1]``."""
    ptr, idx = graph.pred_table(n)
    below = dimension_vector(graph, n - 1)[idx]
    here = np.repeat(dimension_vector(graph, n), np.diff(ptr))
    # int / int on Python ints is correctly rounded even for huge values
    return np.array([int(a) / int(b) for a, b in zip(below, here)], dtype=float)
