"""CSV and JSON serialisation.

Exact rationals are written as ``"num/den"`` strings, floats with ``repr`` (the
shortest round-trip decimal). CSV follows RFC 4180 (the ``csv`` module's
default dialect).
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .combinatorics import DiscreteMeasure
from .graph import GradedGraph, VertexRef
from .intrinsic import LevelMetric, QuotientClasses
from .transport import TransportPlan


def fmt(value: Any) -> Any:
    """Serialise one number; other values pass through."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return f"{value}/1"
    if isinstance(value, float):
        return repr(value)
    return value


def parse_number(text: str) -> Fraction | float:
    """Inverse of :func:`fmt` for numbers."""
    if "/" in text:
        return Fraction(text)
    return float(text)


def label_str(label: Any) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(label_str(x) for x in label) + ")"
    return str(label)


def plain(label: Any) -> Any:
    if isinstance(label, tuple):
        return [plain(x) for x in label]
    return label


def write_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write rows; integer cells (levels, counts) stay plain, other numbers go through :func:`fmt`."""
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([x if isinstance(x, int) else fmt(x) for x in row])


def read_matrix_csv(path: Path) -> tuple[list[str], list[list[Fraction | float]]]:
    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0][1:]
    return header, [[parse_number(x) for x in row[1:]] for row in rows[1:]]


def write_level_metric_csv(path: Path, graph: GradedGraph, metric: LevelMetric) -> None:
    names = [label_str(lab) for lab in graph.labels(metric.level)]
    write_csv(path, [""] + names, ([names[i]] + list(metric.matrix[i]) for i in range(metric.size)))


def level_metric_json(graph: GradedGraph, metric: LevelMetric) -> dict[str, Any]:
    return {
        "level": metric.level,
        "mode": metric.mode,
        "labels": [plain(lab) for lab in graph.labels(metric.level)],
        "matrix": [[fmt(x) for x in row] for row in metric.matrix],
    }


def zero_classes_json(graph: GradedGraph, classes: QuotientClasses) -> dict[str, Any]:
    labels = graph.labels(classes.level)
    return {"level": classes.level, "classes": [[plain(labels[i]) for i in group] for group in classes.classes]}


def plan_json(plan: TransportPlan) -> dict[str, Any]:
    return {"value": fmt(plan.value), "mode": plan.mode, "plan": [[i, j, fmt(x)] for i, j, x in plan.entries]}


def vertex_json(graph: GradedGraph, v: VertexRef) -> dict[str, Any]:
    return {"level": v.level, "index": v.index, "label": plain(graph.label(v))}


def marginal_table(graph: GradedGraph, anchor: VertexRef, measure: DiscreteMeasure) -> dict[str, Any]:
    return {
        "anchor": vertex_json(graph, anchor),
        "level": measure.level,
        "entries": [{"vertex": plain(graph.label(v)), "p": fmt(p)} for v, p in measure],
    }


def cylinder_table(
    graph: GradedGraph, anchor: VertexRef, cylinders: Sequence[Sequence[VertexRef]], probs: Sequence[Fraction]
) -> dict[str, Any]:
    level = len(cylinders[0]) - 1 if cylinders else 0
    return {
        "anchor": vertex_json(graph, anchor),
        "level": level,
        "entries": [
            {"path": [plain(graph.label(v)) for v in path], "p": fmt(p)} for path, p in zip(cylinders, probs)
        ],
    }
