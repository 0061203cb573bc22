"""Slow reference computations used to cross-check the fast routes.

Nothing in the library proper calls these; they back the acceptance checks
and the test suite.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Any, Sequence

from .graph import GradedGraph, VertexRef


def transport_by_vertex_enumeration(a: Sequence[Fraction], b: Sequence[Fraction], cost: Sequence[Sequence[Any]]) -> Fraction:
    """Minimum transport cost over all vertices of the transport polytope.

    Every choice of ``len(a) + len(b) - 1`` cells that forms a spanning tree of
    the bipartite support graph fixes one basic solution, found by peeling
    leaves; the feasible ones are exactly the polytope vertices.
    """
    m, n = len(a), len(b)
    cells = [(i, j) for i in range(m) for j in range(n)]
    best = None
    for subset in itertools.combinations(cells, m + n - 1):
        flows = _peel(subset, a, b)
        if flows is None:
            continue
        value = sum((Fraction(cost[i][j]) * x for (i, j), x in flows.items()), Fraction(0))
        if best is None or value < best:
            best = value
    assert best is not None
    return best


def _peel(subset: Sequence[tuple[int, int]], a: Sequence[Fraction], b: Sequence[Fraction]) -> dict | None:
    supply = {("r", i): Fraction(x) for i, x in enumerate(a)}
    supply.update({("c", j): Fraction(x) for j, x in enumerate(b)})
    remaining = set(subset)
    flows = {}
    while remaining:
        degree: dict[tuple[str, int], int] = {}
        for i, j in remaining:
            degree[("r", i)] = degree.get(("r", i), 0) + 1
            degree[("c", j)] = degree.get(("c", j), 0) + 1
        leaf = next(((node, d) for node, d in sorted(degree.items()) if d == 1), None)
        if leaf is None:
            return None  # the cells contain a cycle
        node = leaf[0]
        cell = next(c for c in remaining if (node[0] == "r" and c[0] == node[1]) or (node[0] == "c" and c[1] == node[1]))
        x = supply[node]
        if x < 0:
            return None
        flows[cell] = x
        other = ("c", cell[1]) if node[0] == "r" else ("r", cell[0])
        supply[node] = Fraction(0)
        supply[other] -= x
        remaining.discard(cell)
    if any(v != 0 for v in supply.values()):
        return None
    return flows


def enumerate_paths_between(graph: GradedGraph, u: VertexRef, v: VertexRef) -> list[tuple[VertexRef, ...]]:
    """Every graph path from ``u`` up to ``v``, by depth-first search."""
    out = []

    def walk(prefix: tuple[VertexRef, ...]) -> None:
        last = prefix[-1]
        if last.level == v.level:
            if last == v:
                out.append(prefix)
            return
        for w in graph.successors(last):
            walk(prefix + (w,))

    walk((u,))
    return out


def pascal_rule_binomials(n: int) -> list[list[int]]:
    """Rows ``0..n`` of Pascal's triangle by repeated addition."""
    rows = [[1]]
    for _ in range(n):
        prev = rows[-1]
        rows.append([1] + [x + y for x, y in zip(prev, prev[1:])] + [1])
    return rows
