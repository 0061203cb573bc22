"""Central measures on the path space, built from an anchor vertex.

A vertex ``t`` on level ``N`` defines the uniform measure on the ``dim t``
paths that end at ``t``. Restricted to the first ``m <= N`` steps, a finite
path ending at ``u`` then has probability ``skew(u, t) / dim t``, which
depends only on ``u``: the measure is central. Following the anchors
``t_n`` of an infinite path and letting ``n`` grow gives the ergodic method;
:func:`estimate_limit_measure` tabulates it and :func:`regularity_report`
checks whether the anchors form a Cauchy sequence for the intrinsic metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .combinatorics import (
    DiscreteMeasure,
    MeasureError,
    dimension,
    dimension_vector,
    predecessor_distribution,
    predecessor_weights,
    predecessor_weights_float,
    push_forward,
    skew_dimension,
)
from .graph import ROOT, BoundsError, BratteliError, GradedGraph, VertexRef
from .intrinsic import IntrinsicMetric


class PathError(BratteliError, ValueError):
    """A finite path is not a path of the graph."""


@dataclass(frozen=True)
class FinitePath:
    """A path from the root, as its vertex sequence ``s_0 = root, ..., s_m``.

    It stands for the cylinder set of infinite paths that begin with it.
    """

    vertices: tuple[VertexRef, ...]

    @classmethod
    def on(cls, graph: GradedGraph, vertices: Iterable[VertexRef]) -> "FinitePath":
        verts = tuple(VertexRef(*v) for v in vertices)
        if not verts or verts[0] != ROOT:
            raise PathError("a finite path must start at the root")
        for k, (u, v) in enumerate(zip(verts, verts[1:])):
            graph.check_vertex(v)
            if v.level != k + 1 or not graph.is_edge(u, v):
                raise PathError(f"step {k}: {u} -> {v} is not an edge")
        return cls(verts)

    @classmethod
    def from_indices(cls, graph: GradedGraph, indices: Sequence[int]) -> "FinitePath":
        """Path given by the vertex index on each level ``0, 1, ..., m``."""
        return cls.on(graph, (VertexRef(n, int(i)) for n, i in enumerate(indices)))

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def end(self) -> VertexRef:
        return self.vertices[-1]

    def prefix(self, m: int) -> "FinitePath":
        return FinitePath(self.vertices[: m + 1])

    def __getitem__(self, n: int) -> VertexRef:
        return self.vertices[n]


class CentralMeasureApprox:
    """The central measure determined by the anchor vertex ``t_n``."""

    def __init__(self, graph: GradedGraph, anchor: VertexRef) -> None:
        graph.check_vertex(anchor)
        self.graph = graph
        self.anchor = anchor
        self.total = dimension(graph, anchor)
        self._co: dict[int, np.ndarray] = {anchor.level: _unit(graph.level_size(anchor.level), anchor.index)}

    def co_dimensions(self, n: int) -> np.ndarray:
        """Number of paths from each vertex of level ``n`` up to the anchor."""
        if not 0 <= n <= self.anchor.level:
            raise BoundsError(f"level {n} outside 0..{self.anchor.level}")
        low = min(self._co)
        while low > n:
            ptr, idx = self.graph.pred_table(low)
            down = np.zeros(self.graph.level_size(low - 1), dtype=object)
            np.add.at(down, idx, np.repeat(self._co[low], np.diff(ptr)))
            low -= 1
            self._co[low] = down
        return self._co[n]

    def cylinder(self, path: FinitePath) -> Fraction:
        if path.length > self.anchor.level:
            raise BoundsError(f"path of length {path.length} is longer than the anchor level {self.anchor.level}")
        return Fraction(int(self.co_dimensions(path.length)[path.end.index]), self.total)

    def marginal(self, n: int) -> DiscreteMeasure:
        co = self.co_dimensions(n)
        dims = dimension_vector(self.graph, n)
        return DiscreteMeasure.from_mapping(
            {VertexRef(n, i): Fraction(int(d) * int(c), self.total) for i, (d, c) in enumerate(zip(dims, co)) if c}
        )


def _unit(size: int, index: int) -> np.ndarray:
    vec = np.zeros(size, dtype=object)
    vec[index] = 1
    return vec


def cylinder_probability(graph: GradedGraph, anchor: VertexRef, path: FinitePath) -> Fraction:
    """``skew(end(path), anchor) / dim(anchor)``, exactly."""
    graph.check_vertex(anchor)
    if path.length > anchor.level:
        raise BoundsError(f"path of length {path.length} is longer than the anchor level {anchor.level}")
    return Fraction(skew_dimension(graph, path.end, anchor), dimension(graph, anchor))


def level_marginal(graph: GradedGraph, anchor: VertexRef, n: int) -> DiscreteMeasure:
    """Distribution of the level-``n`` vertex of a uniform path ending at ``anchor``."""
    return CentralMeasureApprox(graph, anchor).marginal(n)


def project_measure(graph: GradedGraph, measure: DiscreteMeasure) -> DiscreteMeasure:
    """Push a measure on level ``n+1`` down to level ``n`` along predecessor distributions."""
    try:
        level = measure.level
    except MeasureError as exc:
        raise MeasureError(f"cannot project a mixed-level measure: {exc}") from None
    if level == 0:
        raise BoundsError("level 0 has nothing below it")
    out: dict[VertexRef, Fraction] = {}
    for v, weight in measure:
        for w, p in predecessor_distribution(graph, v):
            out[w] = out.get(w, Fraction(0)) + weight * p
    return DiscreteMeasure.from_mapping(out)


# -- ergodic method ----------------------------------------------------------------


@dataclass(frozen=True)
class LimitEstimate:
    """Cylinder probabilities seen from the anchors ``t_n`` of a path.

    ``rows[k]`` belongs to anchor level ``levels[k]`` and lists one exact
    probability per cylinder of ``cylinders``; ``changes[k]`` is the sup-norm
    difference between ``rows[k + 1]`` and ``rows[k]``.
    """

    cylinder_depth: int
    cylinders: tuple[tuple[VertexRef, ...], ...]
    levels: tuple[int, ...]
    rows: tuple[tuple[Fraction, ...], ...]
    changes: tuple[float, ...]

    def row(self, n: int) -> tuple[Fraction, ...]:
        return self.rows[self.levels.index(n)]


def estimate_limit_measure(graph: GradedGraph, path: FinitePath, cylinder_depth: int) -> LimitEstimate:
    """Tabulate ``cylinder_probability(t_n, p)`` for all cylinders ``p`` of length ``m``.

    Path counts from every level-``m`` vertex are pushed up the graph once,
    level by level, and read off at the path vertex of each level.
    """
    m = cylinder_depth
    depth = path.length
    if m < 0 or (m >= depth and not (m == 0 and depth == 0)):
        raise BoundsError(f"cylinder depth {m} must be below the path depth {depth}")
    cylinders = tuple(graph.iter_paths(m))
    ends = np.array([c[-1].index for c in cylinders], dtype=np.int64)
    size = graph.level_size(m)
    dims_m = dimension_vector(graph, m)
    counts = np.zeros((size, size), dtype=object)
    for i in range(size):
        counts[i, i] = 1
    levels, rows = [], []
    for n in range(m, depth + 1):
        if n > m:
            counts = push_forward(graph, n, counts)
        column = counts[:, path[n].index]
        total = int(np.dot(dims_m, column))
        levels.append(n)
        rows.append(tuple(Fraction(int(column[e]), total) for e in ends))
    changes = tuple(
        max((abs(float(x - y)) for x, y in zip(r1, r0)), default=0.0) for r0, r1 in zip(rows, rows[1:])
    )
    return LimitEstimate(m, cylinders, tuple(levels), tuple(rows), changes)


def bernoulli_cylinder(graph: GradedGraph, cylinder: Sequence[VertexRef], p: Fraction) -> Fraction:
    """Probability of a Pascal-2 cylinder when each step raises the first coordinate with probability ``p``."""
    ups = graph.label(cylinder[-1])[0]
    return p**ups * (1 - p) ** (len(cylinder) - 1 - ups)


# -- regularity ----------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityReport:
    """Windowed Cauchy diagnostics for the vertex sequence of a path.

    ``gaps[k]`` belongs to start level ``starts[k]`` and is the largest
    intrinsic distance ``rho(t_i, t_j)`` with ``start <= i < j <= start + window``.
    """

    window: int
    tolerance: float
    burn_in: int
    starts: tuple[int, ...]
    gaps: tuple[float, ...]
    mode: str

    @property
    def verdict(self) -> bool:
        return all(g < self.tolerance for s, g in zip(self.starts, self.gaps) if s >= self.burn_in)

    def post_burn_in(self) -> list[float]:
        return [g for s, g in zip(self.starts, self.gaps) if s >= self.burn_in]


def default_burn_in(depth: int) -> int:
    return math.ceil(0.2 * depth)


def path_pair_distances(
    graph: GradedGraph, path: FinitePath, window: int, metric: IntrinsicMetric | None = None
) -> dict[tuple[int, int], Any]:
    """``rho(t_k, t_l)`` for all ``k < l <= k + window`` along the path.

    Level metrics are streamed bottom-up, so only a couple of levels are held
    in memory when ``metric`` is not supplied.
    """
    depth = path.length
    if metric is None:
        metric = IntrinsicMetric(graph, "float", keep=2)
    frontiers: dict[int, np.ndarray] = {}
    out: dict[tuple[int, int], Any] = {}
    for j in range(depth):
        level = metric.level(j)
        frontiers[j] = _start_vector(graph.level_size(j), path[j].index, level.mode == "exact")
        edge_cost = _edge_costs(graph, metric, level, j + 1)
        ptr, idx = graph.pred_table(j + 1)
        nxt = {}
        for k, dist in frontiers.items():
            if j + 1 - k > window:
                continue
            nxt[k] = np.minimum.reduceat(dist[idx] + edge_cost, ptr[:-1])
            out[(k, j + 1)] = nxt[k][path[j + 1].index]
        frontiers = nxt
    return out


def _start_vector(size: int, index: int, exact: bool) -> np.ndarray:
    if exact:
        vec = np.full(size, math.inf, dtype=object)
        vec[index] = Fraction(0)
    else:
        vec = np.full(size, math.inf)
        vec[index] = 0.0
    return vec


def _edge_costs(graph: GradedGraph, metric: IntrinsicMetric, level: Any, n: int) -> np.ndarray:
    """Adjacent-level distance for every edge ``x -> y`` into level ``n`` (CSR order)."""
    ptr, idx = graph.pred_table(n)
    owner = np.repeat(np.arange(len(ptr) - 1), np.diff(ptr))
    rho = level.matrix
    if level.mode == "exact":
        table = predecessor_weights(graph, n)
        return np.array(
            [sum((w * rho[int(x), int(p)] for p, w in zip(*table[y])), Fraction(0)) for x, y in zip(idx, owner)],
            dtype=object,
        )
    weights = predecessor_weights_float(graph, n)
    cost = np.zeros(len(idx))
    counts = np.diff(ptr)
    for slot in range(int(counts.max())):
        has = counts[owner] > slot
        pos = ptr[owner[has]] + slot
        cost[has] += weights[pos] * rho[idx[has], idx[pos]]
    return cost


def regularity_report(
    graph: GradedGraph,
    path: FinitePath,
    window: int = 20,
    tolerance: float = 0.05,
    burn_in: int | None = None,
    metric: IntrinsicMetric | None = None,
) -> RegularityReport:
    """Sliding-window Cauchy test of a path for the intrinsic metric.

    Args:
        window: Largest level difference of the compared vertex pairs.
        tolerance: A path is reported regular when every gap from
            ``burn_in`` on is below this.
        burn_in: First start level that counts; defaults to 20% of the depth.
        metric: Level metrics to use; defaults to a streamed float metric.
    """
    depth = path.length
    if window < 1 or window > depth:
        raise BoundsError(f"window {window} must be in 1..{depth}")
    if burn_in is None:
        burn_in = default_burn_in(depth)
    pairs = path_pair_distances(graph, path, window, metric)
    mode = "exact" if all(isinstance(v, Fraction) for v in pairs.values()) else "float"
    starts, gaps = [], []
    for n in range(0, depth - window + 1):
        starts.append(n)
        gaps.append(
            float(max(pairs[(k, l)] for k in range(n, n + window) for l in range(k + 1, n + window + 1)))
        )
    return RegularityReport(window, tolerance, burn_in, tuple(starts), tuple(gaps), mode)
