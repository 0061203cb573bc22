"""Intrinsic metrics and central measures on graded graphs (Bratteli diagrams).

Submodules: :mod:`.graph` (builders, loading), :mod:`.combinatorics` (path
counts), :mod:`.transport` (exact Kantorovich distance), :mod:`.intrinsic`
(level metrics), :mod:`.measures` (central measures, limit estimates,
regularity) and :mod:`.cli`.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .combinatorics import DiscreteMeasure, dimension, predecessor_distribution, skew_dimension
from .graph import GradedGraph, VertexRef, build_pascal, build_young, load_graph
from .intrinsic import IntrinsicMetric, adjacent_level_distance, level_metric, path_distance, zero_classes
from .measures import (
    CentralMeasureApprox,
    FinitePath,
    cylinder_probability,
    estimate_limit_measure,
    level_marginal,
    project_measure,
    regularity_report,
)
from .transport import CostMatrix, kantorovich, line_transport_oracle

__all__ = [
    "CentralMeasureApprox",
    "CostMatrix",
    "DiscreteMeasure",
    "FinitePath",
    "GradedGraph",
    "IntrinsicMetric",
    "VertexRef",
    "adjacent_level_distance",
    "build_pascal",
    "build_young",
    "cylinder_probability",
    "dimension",
    "estimate_limit_measure",
    "kantorovich",
    "level_marginal",
    "level_metric",
    "line_transport_oracle",
    "load_graph",
    "path_distance",
    "predecessor_distribution",
    "project_measure",
    "regularity_report",
    "skew_dimension",
    "zero_classes",
]
