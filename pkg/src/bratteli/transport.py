"""Kantorovich (transportation) distance between finitely supported measures.

The transport problem is solved as a min-cost flow on the complete bipartite
graph between the two supports, with the transportation form of the network
simplex method. Pivots use Bland's smallest-index rule, so the method also
terminates on degenerate instances; with :class:`~fractions.Fraction` input the
optimum is exact.

For deep level sweeps there is also :func:`batch_transport`, a vectorised
float solver for many small problems at once (supports of size <= 3). It
evaluates every basic solution of the transport polytope and keeps the best
feasible one.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Hashable, Sequence

import numpy as np

from .combinatorics import DiscreteMeasure, MeasureError
from .graph import BratteliError

EXACT_SUPPORT_LIMIT = 64
FLOAT_TOL = 1e-13
BATCH_MAX_SUPPORT = 3


class TransportError(BratteliError, ValueError):
    """Inputs of a transport problem are inconsistent."""


@dataclass(frozen=True)
class CostMatrix:
    """Symmetric, nonnegative cost with zero diagonal over a list of points.

    The triangle inequality is not required; distinct points may be at
    distance zero.
    """

    points: tuple[Hashable, ...]
    matrix: Any
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        m = self.matrix
        k = len(self.points)
        if len(m) != k or any(len(row) != k for row in m):
            raise TransportError(f"cost matrix must be {k}x{k}")
        for i in range(k):
            if m[i][i] != 0:
                raise TransportError(f"nonzero diagonal entry at {self.points[i]!r}")
            for j in range(i + 1, k):
                if m[i][j] != m[j][i]:
                    raise TransportError(f"cost is not symmetric at ({i}, {j})")
                if m[i][j] < 0:
                    raise TransportError(f"negative cost at ({i}, {j})")
        index = {p: i for i, p in enumerate(self.points)}
        if len(index) != k:
            raise TransportError("duplicate points in cost matrix")
        object.__setattr__(self, "_index", index)

    def index(self, point: Hashable) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise TransportError(f"point {point!r} is not in the cost matrix") from None

    def __call__(self, x: Hashable, y: Hashable) -> Any:
        return self.matrix[self.index(x)][self.index(y)]


@dataclass(frozen=True)
class TransportPlan:
    """An optimal coupling: ``entries`` are ``(i, j, mass)`` with ``mass > 0``.

    ``i`` indexes the source support and ``j`` the target support.
    """

    entries: tuple[tuple[int, int, Any], ...]
    value: Any
    mode: str

    def matrix(self, rows: int, cols: int) -> list[list[Any]]:
        zero = Fraction(0) if self.mode == "exact" else 0.0
        out = [[zero] * cols for _ in range(rows)]
        for i, j, mass in self.entries:
            out[i][j] = mass
        return out


def network_simplex(
    a: Sequence[Any], b: Sequence[Any], cost: Sequence[Sequence[Any]], exact: bool = True
) -> tuple[Any, list[tuple[int, int, Any]]]:
    """Solve ``min sum cost[i][j] x[i][j]`` over couplings of ``a`` and ``b``.

    ``a`` and ``b`` must have equal totals. Returns the optimal value and the
    basic cells of an optimal plan as ``(i, j, x)`` (zero cells included).
    """
    m, n = len(a), len(b)
    eps = 0 if exact else FLOAT_TOL
    # north-west corner start; when a row and a column run out together we
    # step down only, so a zero cell keeps the basis a spanning tree
    flow: dict[tuple[int, int], Any] = {}
    ra, rb = list(a), list(b)
    i = j = 0
    while True:
        q = min(ra[i], rb[j])
        flow[(i, j)] = q
        ra[i] -= q
        rb[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if j == n - 1 or (i < m - 1 and ra[i] <= eps):
            i += 1
        else:
            j += 1

    while True:
        rows: list[list[int]] = [[] for _ in range(m)]
        cols: list[list[int]] = [[] for _ in range(n)]
        for (r, c) in flow:
            rows[r].append(c)
            cols[c].append(r)
        pot_r: list[Any] = [None] * m
        pot_c: list[Any] = [None] * n
        pot_r[0] = 0
        queue = deque([(0, True)])
        while queue:
            node, is_row = queue.popleft()
            if is_row:
                for c in rows[node]:
                    if pot_c[c] is None:
                        pot_c[c] = cost[node][c] - pot_r[node]
                        queue.append((c, False))
            else:
                for r in cols[node]:
                    if pot_r[r] is None:
                        pot_r[r] = cost[r][node] - pot_c[node]
                        queue.append((r, True))

        entering = None
        for r in range(m):
            for c in range(n):
                if (r, c) not in flow and cost[r][c] - pot_r[r] - pot_c[c] < -eps:
                    entering = (r, c)
                    break
            if entering:
                break
        if entering is None:
            break

        cycle = _tree_path(rows, cols, entering[1], entering[0])
        minus = cycle[0::2]
        plus = cycle[1::2]
        theta = min(flow[cell] for cell in minus)
        leaving = min(cell for cell in minus if flow[cell] == theta)
        for cell in minus:
            flow[cell] -= theta
        for cell in plus:
            flow[cell] += theta
        del flow[leaving]
        flow[entering] = theta

    value = sum((cost[r][c] * x for (r, c), x in flow.items()), Fraction(0) if exact else 0.0)
    return value, sorted((r, c, x) for (r, c), x in flow.items())


def _tree_path(rows: list[list[int]], cols: list[list[int]], start_col: int, end_row: int) -> list[tuple[int, int]]:
    """Cells on the basis-tree path from column ``start_col`` to row ``end_row``."""
    parent: dict[tuple[int, bool], tuple[int, bool] | None] = {(start_col, False): None}
    queue = deque([(start_col, False)])
    while queue:
        node = queue.popleft()
        if node == (end_row, True):
            break
        idx, is_row = node
        for nxt in rows[idx] if is_row else cols[idx]:
            key = (nxt, not is_row)
            if key not in parent:
                parent[key] = node
                queue.append(key)
    cells = []
    node: tuple[int, bool] | None = (end_row, True)
    while parent[node] is not None:
        prev = parent[node]
        r, c = (node[0], prev[0]) if node[1] else (prev[0], node[0])
        cells.append((r, c))
        node = prev
    cells.reverse()
    return cells


def kantorovich(
    cost: CostMatrix, mu: DiscreteMeasure, nu: DiscreteMeasure, mode: str = "auto"
) -> tuple[Any, TransportPlan]:
    """Kantorovich distance between ``mu`` and ``nu`` under ``cost``.

    Args:
        mode: ``"exact"`` (rational pivoting), ``"float"``, or ``"auto"``,
            which is exact while both supports have at most 64 points.

    Returns:
        The optimal value and an optimal :class:`TransportPlan`.
    """
    if mode == "auto":
        mode = "exact" if max(len(mu), len(nu)) <= EXACT_SUPPORT_LIMIT else "float"
    if mode not in ("exact", "float"):
        raise TransportError(f"unknown mode {mode!r}")
    for meas in (mu, nu):
        if sum(meas.weights) != 1:
            raise MeasureError("measure is not normalised")
    ri = [cost.index(p) for p in mu.support]
    ci = [cost.index(p) for p in nu.support]
    exact = mode == "exact"
    conv = Fraction if exact else float
    a = [conv(w) for w in mu.weights]
    b = [conv(w) for w in nu.weights]
    sub = [[conv(cost.matrix[r][c]) for c in ci] for r in ri]
    value, cells = network_simplex(a, b, sub, exact=exact)
    entries = tuple((r, c, x) for r, c, x in cells if x > 0)
    return value, TransportPlan(entries, value, mode)


def line_transport_oracle(positions: Sequence[Any], mu: DiscreteMeasure, nu: DiscreteMeasure) -> Fraction:
    """Wasserstein-1 on the real line through the CDF-difference integral.

    ``positions`` must be strictly increasing; the supports of ``mu`` and ``nu``
    are position values.
    """
    pos = [Fraction(p) for p in positions]
    if any(p >= q for p, q in zip(pos, pos[1:])):
        raise TransportError("positions must be strictly increasing")
    known = set(pos)
    for meas in (mu, nu):
        for p in meas.support:
            if Fraction(p) not in known:
                raise TransportError(f"support point {p!r} is not a listed position")
    wm = {Fraction(p): w for p, w in mu}
    wn = {Fraction(p): w for p, w in nu}
    total = Fraction(0)
    cdf_m = cdf_n = Fraction(0)
    for left, right in zip(pos, pos[1:]):
        cdf_m += wm.get(left, 0)
        cdf_n += wn.get(left, 0)
        total += abs(cdf_m - cdf_n) * (right - left)
    return total


@lru_cache(maxsize=None)
def _basis_maps(ka: int, kb: int) -> tuple[np.ndarray, np.ndarray]:
    """All spanning trees of K_{ka,kb} with the linear map from marginals to flows.

    Returns ``cells`` of shape (T, ka+kb-1) with flat cell ids and ``maps`` of
    shape (T, ka+kb-1, ka+kb-1) taking ``[a, b[:-1]]`` to the tree flows.
    """
    size = ka + kb - 1
    all_cells = [(i, j) for i in range(ka) for j in range(kb)]
    cells_out, maps_out = [], []
    for subset in itertools.combinations(range(len(all_cells)), size):
        parent = list(range(ka + kb))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for cid in subset:
            i, j = all_cells[cid]
            ri, rj = find(i), find(ka + j)
            if ri == rj:
                acyclic = False
                break
            parent[ri] = rj
        if not acyclic:
            continue
        eq = np.zeros((ka + kb, size))
        for col, cid in enumerate(subset):
            i, j = all_cells[cid]
            eq[i, col] = 1
            eq[ka + j, col] = 1
        cells_out.append(subset)
        maps_out.append(np.rint(np.linalg.inv(eq[:-1])))
    return np.array(cells_out, dtype=np.int64), np.array(maps_out)


def batch_transport(cost: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Float Kantorovich values for a batch of small transport problems.

    Args:
        cost: Array (B, ka, kb) of costs.
        a: Array (B, ka) of source weights; zero padding is allowed.
        b: Array (B, kb) of target weights with the same row totals as ``a``.
    """
    batch, ka, kb = cost.shape
    if max(ka, kb) > BATCH_MAX_SUPPORT:
        raise TransportError(f"batch solver handles supports up to {BATCH_MAX_SUPPORT}")
    if ka == kb == 2:
        return _batch_two_by_two(cost, a, b)
    cells, maps = _basis_maps(ka, kb)
    trees, width, _ = maps.shape
    rhs = np.concatenate([a, b[:, :-1]], axis=1)
    flows = (rhs @ maps.transpose(2, 0, 1).reshape(width, trees * width)).reshape(batch, trees, width)
    values = (flows * cost.reshape(batch, ka * kb)[:, cells]).sum(axis=2)
    values[flows.min(axis=2) < -1e-12] = np.inf
    return values.min(axis=1)


def _batch_two_by_two(cost: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # plans form the segment x00 = t in [max(0, a0 - b1), min(a0, b0)] and the
    # objective is linear in t, so the optimum sits at one end
    a0, b0, b1 = a[:, 0], b[:, 0], b[:, 1]
    c00, c01, c10, c11 = cost[:, 0, 0], cost[:, 0, 1], cost[:, 1, 0], cost[:, 1, 1]
    slope = c00 - c01 - c10 + c11
    t = np.where(slope >= 0, np.maximum(0.0, a0 - b1), np.minimum(a0, b0))
    return t * slope + c01 * a0 + c10 * b0 + c11 * (a[:, 1] - b0)
