"""The intrinsic semimetric on the vertices of a graded graph.

Level metrics are built bottom-up: the root level is a single point, level 1
carries the discrete metric with value 1, and for ``n >= 2`` the distance of
two vertices is the Kantorovich distance between their predecessor
distributions over the level ``n - 1`` metric. Distances across levels are
assembled from adjacent-level terms by a shortest-path pass over the graph.

Exact levels hold :class:`~fractions.Fraction` entries in an ``object`` array;
float levels hold ``float64``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .combinatorics import predecessor_weights, predecessor_weights_float
from .graph import BoundsError, BratteliError, GradedGraph, VertexRef
from .transport import BATCH_MAX_SUPPORT, EXACT_SUPPORT_LIMIT, batch_transport, network_simplex

MODES = ("exact", "float", "auto")


class UnreachableError(BratteliError, ValueError):
    """No graph path joins the two vertices."""


class ModeError(BratteliError, ValueError):
    """The requested operation needs exact arithmetic."""


@dataclass(frozen=True)
class LevelMetric:
    """The intrinsic semimetric restricted to one level."""

    level: int
    matrix: np.ndarray
    mode: str

    def __call__(self, i: int, j: int) -> Any:
        return self.matrix[i, j]

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def as_float(self) -> np.ndarray:
        return self.matrix.astype(float)

    def diameter(self) -> Any:
        if self.size == 1:
            return Fraction(0) if self.mode == "exact" else 0.0
        return self.matrix.max()


@dataclass(frozen=True)
class QuotientClasses:
    """Partition of a level into groups of vertices at mutual distance zero."""

    level: int
    classes: tuple[tuple[int, ...], ...]

    def class_of(self, index: int) -> tuple[int, ...]:
        for group in self.classes:
            if index in group:
                return group
        raise BoundsError(f"index {index} not on level {self.level}")


class IntrinsicMetric:
    """Lazily computed, cached level metrics of one graph.

    Args:
        graph: The graph.
        mode: ``"exact"``, ``"float"`` or ``"auto"``. Auto stays exact while
            levels have at most 64 vertices and switches to float for good once
            a level is larger.
        seed: Optional start metric replacing the computed one on some level;
            higher levels are then built from it. Either ``(level, matrix)``
            or a bare level number, meaning the discrete metric (value 1) on
            that level. Graphs whose first level is a single vertex (the
            Young graph) need a seed to get a nonzero metric.
        keep: Keep only the most recent ``keep`` levels in memory. Evicted
            levels are never recomputed; asking for one is an error.
    """

    def __init__(
        self,
        graph: GradedGraph,
        mode: str = "auto",
        seed: tuple[int, Any] | int | None = None,
        keep: int | None = None,
    ) -> None:
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.graph = graph
        self.mode = mode
        self.keep = keep
        self._levels: dict[int, LevelMetric] = {}
        self._top = -1
        self._seed = None
        if seed is not None:
            if isinstance(seed, int):
                size = graph.level_size(seed) if 0 <= seed <= graph.depth else 0
                seed = (seed, [[int(i != j) for j in range(size)] for i in range(size)])
            level, matrix = seed
            if not 0 <= level <= graph.depth:
                raise BoundsError(f"seed level {level} outside 0..{graph.depth}")
            self._seed = (level, self._as_level(level, matrix))

    @property
    def first_level(self) -> int:
        """Lowest level the profile diagnostics start from (the seed level, or 1)."""
        return max(1, self._seed[0]) if self._seed is not None else 1

    def _as_level(self, n: int, matrix: Any) -> LevelMetric:
        arr = np.array(matrix, dtype=object)
        size = self.graph.level_size(n)
        if arr.shape != (size, size):
            raise BoundsError(f"seed for level {n} must be {size}x{size}")
        if any(isinstance(x, float) for x in arr.flat):
            return LevelMetric(n, arr.astype(float), "float")
        return LevelMetric(n, np.vectorize(Fraction, otypes=[object])(arr), "exact")

    # -- level metrics ---------------------------------------------------------

    def level(self, n: int) -> LevelMetric:
        if not 0 <= n <= self.graph.depth:
            raise BoundsError(f"level {n} outside 0..{self.graph.depth}")
        if n in self._levels:
            return self._levels[n]
        if n <= self._top:
            raise BratteliError(f"level {n} was evicted (keep={self.keep}); levels are never recomputed")
        for k in range(self._top + 1, n + 1):
            self._levels[k] = self._compute(k)
            self._top = k
            if self.keep is not None:
                for old in [j for j in self._levels if j <= k - self.keep]:
                    del self._levels[old]
        return self._levels[n]

    def _want_exact(self, n: int, below: LevelMetric | None) -> bool:
        if self.mode == "float":
            return False
        if self.mode == "exact":
            return below is None or below.mode == "exact"
        if below is not None and below.mode != "exact":
            return False
        return self.graph.level_size(n) <= EXACT_SUPPORT_LIMIT

    def _compute(self, n: int) -> LevelMetric:
        if self._seed is not None and self._seed[0] == n:
            return self._seed[1]
        size = self.graph.level_size(n)
        if n <= 1:
            exact = self._want_exact(n, None)
            if exact:
                mat = np.full((size, size), Fraction(1), dtype=object)
                np.fill_diagonal(mat, Fraction(0))
            else:
                mat = np.ones((size, size)) - np.eye(size)
            return LevelMetric(n, mat, "exact" if exact else "float")
        below = self._levels[n - 1]
        if self._want_exact(n, below):
            return LevelMetric(n, self._exact_level(n, below.matrix), "exact")
        return LevelMetric(n, self._float_level(n, below.as_float()), "float")

    def _exact_level(self, n: int, prev: np.ndarray) -> np.ndarray:
        table = predecessor_weights(self.graph, n)
        size = len(table)
        mat = np.empty((size, size), dtype=object)
        zero = Fraction(0)
        for i in range(size):
            mat[i, i] = zero
            pi, wi = table[i]
            for j in range(i + 1, size):
                pj, wj = table[j]
                mat[i, j] = mat[j, i] = _exact_pair(prev, pi, wi, pj, wj)
        return mat

    def _float_level(self, n: int, prev: np.ndarray) -> np.ndarray:
        ptr, idx = self.graph.pred_table(n)
        weights = predecessor_weights_float(self.graph, n)
        counts = np.diff(ptr)
        size = len(counts)
        k = int(counts.max())
        if k > BATCH_MAX_SUPPORT:
            return self._float_level_pairwise(ptr, idx, weights, prev)
        k = max(k, 2)
        preds = np.zeros((size, k), dtype=np.int64)
        wts = np.zeros((size, k))
        slot = np.arange(len(idx)) - np.repeat(ptr[:-1], counts)
        owner = np.repeat(np.arange(size), counts)
        preds[owner, slot] = idx
        wts[owner, slot] = weights
        budget = 20_000 if k == 3 else 400_000
        mat = np.zeros((size, size))
        start = 0
        while start < size:
            # upper triangle only: rows [start, stop) against columns [start, size)
            width = size - start
            stop = min(size, start + max(1, budget // width))
            pr, pc = preds[start:stop], preds[start:]
            c = stop - start
            cost = prev[pr[:, None, :, None], pc[None, :, None, :]].reshape(c * width, k, k)
            a = np.repeat(wts[start:stop], width, axis=0)
            b = np.tile(wts[start:], (c, 1))
            mat[start:stop, start:] = batch_transport(cost, a, b).reshape(c, width)
            start = stop
        mat = np.triu(mat, 1)
        return mat + mat.T

    @staticmethod
    def _float_level_pairwise(ptr: np.ndarray, idx: np.ndarray, weights: np.ndarray, prev: np.ndarray) -> np.ndarray:
        size = len(ptr) - 1
        rows = [(idx[ptr[i] : ptr[i + 1]], list(weights[ptr[i] : ptr[i + 1]])) for i in range(size)]
        mat = np.zeros((size, size))
        for i in range(size):
            pi, wi = rows[i]
            for j in range(i + 1, size):
                pj, wj = rows[j]
                sub = prev[np.ix_(pi, pj)].tolist()
                value, _ = network_simplex(wi, wj, sub, exact=False)
                mat[i, j] = mat[j, i] = value
        return mat

    # -- cross-level distances -----------------------------------------------------

    def adjacent(self, u: VertexRef, w: VertexRef) -> Any:
        """Distance from ``u`` on level n to ``w`` on level n+1.

        Transport of the point mass at ``u`` onto the predecessor distribution
        of ``w``, both on level n.
        """
        self.graph.check_vertex(u)
        self.graph.check_vertex(w)
        if w.level != u.level + 1:
            raise BoundsError(f"levels {u.level} and {w.level} are not adjacent")
        metric = self.level(u.level)
        return self._adjacent(metric, w, u.index)

    def _adjacent(self, metric: LevelMetric, w: VertexRef, u_index: int) -> Any:
        if metric.mode == "exact":
            preds, weights = predecessor_weights(self.graph, w.level)[w.index]
            return sum((wt * metric.matrix[u_index, x] for x, wt in zip(preds, weights)), Fraction(0))
        ptr, idx = self.graph.pred_table(w.level)
        key = ("nu_float", w.level)
        memo = self.graph._memo
        if key not in memo:
            memo[key] = predecessor_weights_float(self.graph, w.level)
        lo, hi = ptr[w.index], ptr[w.index + 1]
        return float(np.dot(memo[key][lo:hi], metric.matrix[u_index, idx[lo:hi]]))

    def path_distance(self, z: VertexRef, v: VertexRef) -> Any:
        """Minimal sum of adjacent-level distances over graph paths from ``z`` up to ``v``."""
        self.graph.check_vertex(z)
        self.graph.check_vertex(v)
        if z.level >= v.level:
            raise BoundsError(f"path distance needs level(z) < level(v), got {z.level} >= {v.level}")
        ancestors = [set() for _ in range(v.level + 1)]
        ancestors[v.level] = {v.index}
        for n in range(v.level, z.level, -1):
            ptr, idx = self.graph.pred_table(n)
            ancestors[n - 1] = {int(x) for i in ancestors[n] for x in idx[ptr[i] : ptr[i + 1]]}
        if z.index not in ancestors[z.level]:
            raise UnreachableError(f"no path from {z} to {v}")
        dist = {z.index: 0}
        for n in range(z.level, v.level):
            metric = self.level(n)
            ptr, idx = self.graph.pred_table(n + 1)
            nxt = {}
            for y in ancestors[n + 1]:
                best = None
                for x in idx[ptr[y] : ptr[y + 1]]:
                    x = int(x)
                    if x in dist:
                        d = dist[x] + self._adjacent(metric, VertexRef(n + 1, y), x)
                        if best is None or d < best:
                            best = d
                if best is not None:
                    nxt[y] = best
            dist = nxt
        return dist[v.index]

    # -- diagnostics ------------------------------------------------------------

    def zero_classes(self, n: int) -> QuotientClasses:
        metric = self.level(n)
        if metric.mode != "exact":
            raise ModeError(f"level {n} is in float mode; zero classes need an exact recompute")
        size = metric.size
        parent = list(range(size))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(size):
            for j in range(i + 1, size):
                if metric.matrix[i, j] == 0:
                    parent[find(j)] = find(i)
        groups: dict[int, list[int]] = {}
        for i in range(size):
            groups.setdefault(find(i), []).append(i)
        return QuotientClasses(n, tuple(tuple(g) for g in sorted(groups.values())))

    def diameter_profile(self, up_to: int) -> list[Any]:
        """Diameters of levels ``first_level..up_to``."""
        if not self.first_level <= up_to <= self.graph.depth:
            raise BoundsError(f"up_to must be in {self.first_level}..{self.graph.depth}")
        return [self.level(n).diameter() for n in range(self.first_level, up_to + 1)]


def _exact_pair(prev: np.ndarray, pi: np.ndarray, wi: list[Fraction], pj: np.ndarray, wj: list[Fraction]) -> Fraction:
    if len(pi) == len(pj) and np.array_equal(pi, pj) and wi == wj:
        return Fraction(0)
    if len(pi) == 1:
        return sum((w * prev[pi[0], y] for y, w in zip(pj, wj)), Fraction(0))
    if len(pj) == 1:
        return sum((w * prev[x, pj[0]] for x, w in zip(pi, wi)), Fraction(0))
    sub = [[prev[x, y] for y in pj] for x in pi]
    value, _ = network_simplex(wi, wj, sub, exact=True)
    return value


def _metric_for(graph: GradedGraph, mode: str) -> IntrinsicMetric:
    key = ("intrinsic", mode)
    if key not in graph._memo:
        graph._memo[key] = IntrinsicMetric(graph, mode)
    return graph._memo[key]


def level_metric(graph: GradedGraph, n: int, mode: str = "auto") -> LevelMetric:
    return _metric_for(graph, mode).level(n)


def adjacent_level_distance(graph: GradedGraph, u: VertexRef, w: VertexRef, mode: str = "auto") -> Any:
    return _metric_for(graph, mode).adjacent(u, w)


def path_distance(graph: GradedGraph, z: VertexRef, v: VertexRef, mode: str = "auto") -> Any:
    return _metric_for(graph, mode).path_distance(z, v)


def zero_classes(graph: GradedGraph, n: int, mode: str = "exact") -> QuotientClasses:
    return _metric_for(graph, mode).zero_classes(n)


def diameter_profile(graph: GradedGraph, up_to: int, mode: str = "auto") -> list[Any]:
    return _metric_for(graph, mode).diameter_profile(up_to)


def pairwise(metric: LevelMetric) -> Sequence[tuple[int, int, Any]]:
    """Upper-triangle entries ``(i, j, rho)`` of a level metric."""
    m = metric.matrix
    return [(i, j, m[i, j]) for i in range(metric.size) for j in range(i + 1, metric.size)]
