"""Graded graphs (Bratteli diagrams) without multiple edges.

A graph is stored level by level. Level ``n`` is a list of vertex labels in a
fixed canonical order, and for ``n >= 1`` the edge relation between levels
``n - 1`` and ``n`` is kept as predecessor lists in CSR form (``ptr``/``idx``
integer arrays), which keeps deep Pascal graphs cheap to hold in memory.
"""

from __future__ import annotations

from typing import Any, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

MAX_PASCAL_DIMENSION = 6
MAX_YOUNG_DEPTH = 40


class BratteliError(Exception):
    """Base class for all errors raised by this package."""


class BoundsError(BratteliError, ValueError):
    """A level, dimension or depth argument is out of its allowed range."""


class GraphValidationError(BratteliError, ValueError):
    """A graph document or graph structure violates the graded-graph rules."""


class VertexRef(NamedTuple):
    """Position of a vertex: its level and its index within the level."""

    level: int
    index: int

    def __str__(self) -> str:
        return f"{self.level}:{self.index}"


ROOT = VertexRef(0, 0)


def _as_label(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_as_label(v) for v in value)
    return value


class GradedGraph:
    """An immutable N-graded graph built to a finite depth.

    Args:
        name: Display name, kept in exports.
        labels: One sequence of labels per level. A sequence may be a list of
            hashable labels or a 2-d integer array whose rows are labels.
        preds: For each level ``n >= 1`` a pair ``(ptr, idx)``: the
            predecessors of vertex ``i`` are ``idx[ptr[i]:ptr[i + 1]]``.
        validate: Run :meth:`validate` after construction.
    """

    def __init__(
        self,
        name: str,
        labels: Sequence[Sequence[Any]],
        preds: Sequence[tuple[np.ndarray, np.ndarray]],
        validate: bool = True,
    ) -> None:
        if len(preds) != len(labels) - 1:
            raise GraphValidationError("need one predecessor table per level above 0")
        self.name = name
        self._labels = list(labels)
        self._preds = [(np.asarray(p, dtype=np.int64), np.asarray(i, dtype=np.int64)) for p, i in preds]
        for arr in (a for pair in self._preds for a in pair):
            arr.setflags(write=False)
        self._index: dict[int, dict[Any, int]] = {}
        # write-once memo tables shared by the analysis modules
        self._memo: dict[Any, Any] = {}
        if validate:
            self.validate()

    # -- structure -------------------------------------------------------

    @property
    def depth(self) -> int:
        return len(self._labels) - 1

    def level_size(self, n: int) -> int:
        self._check_level(n)
        return len(self._labels[n])

    def level_sizes(self) -> list[int]:
        return [len(level) for level in self._labels]

    def vertices(self, n: int) -> list[VertexRef]:
        return [VertexRef(n, i) for i in range(self.level_size(n))]

    def pred_table(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """CSR predecessor table ``(ptr, idx)`` of level ``n >= 1``."""
        self._check_level(n)
        if n == 0:
            raise BoundsError("level 0 has no predecessors")
        return self._preds[n - 1]

    def predecessors(self, v: VertexRef) -> list[VertexRef]:
        self.check_vertex(v)
        if v.level == 0:
            return []
        ptr, idx = self._preds[v.level - 1]
        return [VertexRef(v.level - 1, int(i)) for i in idx[ptr[v.index] : ptr[v.index + 1]]]

    def successors(self, v: VertexRef) -> list[VertexRef]:
        self.check_vertex(v)
        if v.level == self.depth:
            return []
        key = ("succ", v.level + 1)
        if key not in self._memo:
            ptr, idx = self._preds[v.level]
            owners = np.repeat(np.arange(len(ptr) - 1), np.diff(ptr))
            order = np.argsort(idx, kind="stable")
            counts = np.bincount(idx, minlength=self.level_size(v.level))
            sptr = np.concatenate([[0], np.cumsum(counts)])
            self._memo[key] = (sptr, owners[order])
        sptr, sidx = self._memo[key]
        return [VertexRef(v.level + 1, int(i)) for i in sidx[sptr[v.index] : sptr[v.index + 1]]]

    def is_edge(self, u: VertexRef, v: VertexRef) -> bool:
        """True when ``u`` precedes ``v`` (``u`` on the level just below)."""
        return v.level == u.level + 1 and u in self.predecessors(v)

    # -- labels ------------------------------------------------------------

    def label(self, v: VertexRef) -> Any:
        self.check_vertex(v)
        raw = self._labels[v.level][v.index]
        if isinstance(raw, np.ndarray):
            return tuple(int(x) for x in raw)
        return raw

    def labels(self, n: int) -> list[Any]:
        self._check_level(n)
        level = self._labels[n]
        if isinstance(level, np.ndarray):
            return [tuple(int(x) for x in row) for row in level]
        return list(level)

    def index_of(self, n: int, label: Any) -> VertexRef:
        """Look up a vertex of level ``n`` by its label."""
        self._check_level(n)
        if n not in self._index:
            self._index[n] = {lab: i for i, lab in enumerate(self.labels(n))}
        try:
            return VertexRef(n, self._index[n][_as_label(label)])
        except KeyError:
            raise KeyError(f"no vertex labelled {label!r} at level {n}") from None

    # -- checks --------------------------------------------------------------

    def _check_level(self, n: int) -> None:
        if not 0 <= n <= self.depth:
            raise BoundsError(f"level {n} outside 0..{self.depth}")

    def check_vertex(self, v: VertexRef) -> None:
        self._check_level(v.level)
        if not 0 <= v.index < len(self._labels[v.level]):
            raise BoundsError(f"vertex index {v.index} outside level {v.level}")

    def validate(self) -> None:
        """Check the graded-graph invariants; raise GraphValidationError if broken."""
        if len(self._labels) == 0 or len(self._labels[0]) != 1:
            raise GraphValidationError("level 0 must contain exactly one vertex")
        for n in range(1, self.depth + 1):
            size = len(self._labels[n])
            if size == 0:
                raise GraphValidationError(f"level {n} is empty")
            ptr, idx = self._preds[n - 1]
            below = len(self._labels[n - 1])
            if len(ptr) != size + 1 or ptr[0] != 0 or ptr[-1] != len(idx) or np.any(np.diff(ptr) < 0):
                raise GraphValidationError(f"malformed predecessor table at level {n}")
            for i in range(size):
                row = idx[ptr[i] : ptr[i + 1]]
                if len(row) == 0:
                    raise GraphValidationError(
                        f"vertex {n}:{i} ({self.label(VertexRef(n, i))!r}) has no predecessor"
                    )
                if np.any(row < 0) or np.any(row >= below):
                    raise GraphValidationError(f"vertex {n}:{i} has a predecessor index out of range")
                if len(np.unique(row)) != len(row):
                    raise GraphValidationError(f"vertex {n}:{i} has a duplicate edge")
            has_succ = np.zeros(below, dtype=bool)
            has_succ[idx] = True
            if not has_succ.all():
                i = int(np.flatnonzero(~has_succ)[0])
                raise GraphValidationError(
                    f"vertex {n - 1}:{i} ({self.label(VertexRef(n - 1, i))!r}) has no successor"
                )
            labs = self.labels(n)
            if len(set(labs)) != len(labs):
                raise GraphValidationError(f"duplicate labels at level {n}")

    # -- comparison / export ---------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedGraph):
            return NotImplemented
        if self.name != other.name or self.level_sizes() != other.level_sizes():
            return False
        for n in range(self.depth + 1):
            if self.labels(n) != other.labels(n):
                return False
        for (p1, i1), (p2, i2) in zip(self._preds, other._preds):
            if not (np.array_equal(p1, p2) and np.array_equal(i1, i2)):
                return False
        return True

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"GradedGraph({self.name!r}, depth={self.depth})"

    def to_document(self) -> dict[str, Any]:
        """Serialise to the JSON graph document (labels become lists)."""

        def plain(label: Any) -> Any:
            if isinstance(label, tuple):
                return [plain(x) for x in label]
            return label

        edges: list[list[list[int]]] = [[[]]]
        for n in range(1, self.depth + 1):
            ptr, idx = self._preds[n - 1]
            edges.append([[int(x) for x in idx[ptr[i] : ptr[i + 1]]] for i in range(len(ptr) - 1)])
        return {
            "name": self.name,
            "levels": [[plain(lab) for lab in self.labels(n)] for n in range(self.depth + 1)],
            "edges": edges,
        }

    def iter_paths(self, length: int) -> Iterator[tuple[VertexRef, ...]]:
        """All paths from the root of the given length, in canonical order."""
        if not 0 <= length <= self.depth:
            raise BoundsError(f"path length {length} outside 0..{self.depth}")

        def extend(prefix: tuple[VertexRef, ...]) -> Iterator[tuple[VertexRef, ...]]:
            if len(prefix) == length + 1:
                yield prefix
                return
            for w in self.successors(prefix[-1]):
                yield from extend(prefix + (w,))

        yield from extend((ROOT,))


def _csr(pred_lists: Iterable[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = [0]
    flat: list[int] = []
    for row in pred_lists:
        flat.extend(row)
        ptr.append(len(flat))
    return np.asarray(ptr, dtype=np.int64), np.asarray(flat, dtype=np.int64)


def compositions(n: int, parts: int) -> list[tuple[int, ...]]:
    """Weak compositions of ``n`` into ``parts`` parts, lexicographically descending."""
    if parts == 1:
        return [(n,)]
    out = []
    for first in range(n, -1, -1):
        out.extend((first,) + rest for rest in compositions(n - first, parts - 1))
    return out


def partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of ``n`` in reverse lexicographic order, e.g. (4), (3,1), (2,2), ..."""
    if largest is None:
        largest = n
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        out.extend((first,) + rest for rest in partitions(n - first, first))
    return out


def build_pascal(dimension: int, depth: int) -> GradedGraph:
    """Pascal graph of the given dimension (triangle for 2, tetrahedron for 3).

    Level ``n`` holds the lattice points ``(k_1, ..., k_d)`` with ``sum k_i = n``
    in descending lexicographic order; ``u`` precedes ``v`` when ``v - u`` is a
    unit vector.
    """
    if not 2 <= dimension <= MAX_PASCAL_DIMENSION:
        raise BoundsError(f"pascal dimension must be in 2..{MAX_PASCAL_DIMENSION}, got {dimension}")
    if depth < 1:
        raise BoundsError(f"depth must be >= 1, got {depth}")
    labels: list[np.ndarray] = [np.zeros((1, dimension), dtype=np.int64)]
    preds = []
    if dimension == 2:
        # vertex i of level n is (n - i, i); its predecessors are i - 1 and i
        for n in range(1, depth + 1):
            i = np.arange(n + 1)
            labels.append(np.stack([n - i, i], axis=1))
            counts = np.full(n + 1, 2)
            counts[[0, -1]] = 1
            idx = np.stack([i - 1, i], axis=1).ravel()
            keep = (idx >= 0) & (idx < n)
            preds.append((np.concatenate([[0], np.cumsum(counts)]), idx[keep]))
        return GradedGraph("pascal:2", labels, preds, validate=False)
    prev_index = {(0,) * dimension: 0}
    for n in range(1, depth + 1):
        level = compositions(n, dimension)
        rows = []
        for v in level:
            row = []
            for k in range(dimension):
                if v[k]:
                    row.append(prev_index[v[:k] + (v[k] - 1,) + v[k + 1 :]])
            rows.append(sorted(row))
        preds.append(_csr(rows))
        labels.append(np.asarray(level, dtype=np.int64))
        prev_index = {v: i for i, v in enumerate(level)}
    return GradedGraph(f"pascal:{dimension}", labels, preds, validate=False)


def build_young(depth: int) -> GradedGraph:
    """Young graph: level ``n`` is the partitions of ``n``, edges add one box."""
    if not 1 <= depth <= MAX_YOUNG_DEPTH:
        raise BoundsError(f"young depth must be in 1..{MAX_YOUNG_DEPTH}, got {depth}")
    labels: list[list[tuple[int, ...]]] = [[()]]
    preds = []
    prev_index: dict[tuple[int, ...], int] = {(): 0}
    for n in range(1, depth + 1):
        level = partitions(n)
        rows = []
        for lam in level:
            row = []
            for i, part in enumerate(lam):
                if i + 1 == len(lam) or lam[i + 1] < part:
                    smaller = lam[:i] + (part - 1,) + lam[i + 1 :]
                    row.append(prev_index[tuple(x for x in smaller if x)])
            rows.append(sorted(row))
        preds.append(_csr(rows))
        labels.append(level)
        prev_index = {lam: i for i, lam in enumerate(level)}
    return GradedGraph("young", labels, preds, validate=False)


def load_graph(document: dict[str, Any]) -> GradedGraph:
    """Build and validate a graph from a parsed JSON graph document.

    ``edges[n][i]`` lists the predecessors of vertex ``i`` of level ``n``.
    Each entry is either an index into level ``n - 1`` or an explicit
    ``[level, index]`` pair; pairs naming any other level are rejected.
    """
    if not isinstance(document, dict):
        raise GraphValidationError("graph document must be a JSON object")
    for key in ("levels", "edges"):
        if key not in document:
            raise GraphValidationError(f"graph document is missing {key!r}")
    levels = document["levels"]
    edges = document["edges"]
    if not isinstance(levels, list) or not levels or not all(isinstance(l, list) for l in levels):
        raise GraphValidationError("'levels' must be a non-empty list of lists")
    if not isinstance(edges, list) or len(edges) != len(levels):
        raise GraphValidationError("'edges' must have one entry per level")
    if edges[0] not in ([], [[]]):
        raise GraphValidationError("the root vertex cannot have predecessors")
    labels = [[_as_label(x) for x in level] for level in levels]
    preds = []
    for n in range(1, len(levels)):
        rows = edges[n]
        if not isinstance(rows, list) or len(rows) != len(levels[n]):
            raise GraphValidationError(f"edges[{n}] must list predecessors for each of {len(levels[n])} vertices")
        clean = []
        for i, row in enumerate(rows):
            if not isinstance(row, list):
                raise GraphValidationError(f"edges[{n}][{i}] must be a list")
            out = []
            for entry in row:
                if isinstance(entry, list):
                    if len(entry) != 2 or not all(isinstance(x, int) for x in entry):
                        raise GraphValidationError(f"edges[{n}][{i}] has a malformed entry {entry!r}")
                    if entry[0] != n - 1:
                        raise GraphValidationError(
                            f"vertex {n}:{i} ({labels[n][i]!r}) has an edge from level {entry[0]}; "
                            f"edges may only join adjacent levels"
                        )
                    entry = entry[1]
                if not isinstance(entry, int) or isinstance(entry, bool):
                    raise GraphValidationError(f"edges[{n}][{i}] has a non-integer entry {entry!r}")
                out.append(entry)
            clean.append(out)
        preds.append(_csr(clean))
    return GradedGraph(str(document.get("name", "custom")), labels, preds)
