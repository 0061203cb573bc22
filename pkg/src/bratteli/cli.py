"""Command line: ``bratteli metric | measure | graph-export | selftest``.

Exit codes: 0 success, 1 invalid input, 2 failure during computation (for
``selftest``: some check failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .graph import BratteliError, GradedGraph, VertexRef, build_pascal, build_young, load_graph
from .intrinsic import IntrinsicMetric
from .io import cylinder_table, fmt, label_str, marginal_table, plain, write_csv, write_json, write_level_metric_csv
from .measures import (
    CentralMeasureApprox,
    FinitePath,
    bernoulli_cylinder,
    estimate_limit_measure,
    regularity_report,
)
from .paths import parse_path_spec

REGULARITY_DEPTH_CAP = 512


class UsageError(Exception):
    """Invalid command-line input; exits with status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    depth: int | None = None
    out: str | None = None
    mode: str = "auto"
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict[str, Any]:
        return {**asdict(self), "version": __version__}


# -- parsing helpers -----------------------------------------------------------------


def resolve_graph(spec: str, depth: int | None) -> GradedGraph:
    """Build the graph named by ``pascal:d``, ``young`` or ``file:PATH``."""
    kind, _, arg = spec.partition(":")
    if kind == "pascal":
        if depth is None:
            raise UsageError("--depth is required for builtin graphs")
        try:
            dim = int(arg)
        except ValueError:
            raise UsageError(f"bad Pascal dimension in {spec!r}") from None
        return build_pascal(dim, depth)
    if kind == "young" and not arg:
        if depth is None:
            raise UsageError("--depth is required for builtin graphs")
        return build_young(depth)
    if kind == "file":
        try:
            document = json.loads(Path(arg).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read graph file {arg}: {exc}") from None
        graph = load_graph(document)
        if depth is not None and depth > graph.depth:
            raise UsageError(f"--depth {depth} exceeds the file graph depth {graph.depth}")
        return graph
    raise UsageError(f"unknown graph {spec!r}; use pascal:d, young or file:PATH")


def parse_anchor(text: str, graph: GradedGraph) -> VertexRef:
    try:
        level, index = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"anchor must look like LEVEL:INDEX, got {text!r}") from None
    v = VertexRef(level, index)
    graph.check_vertex(v)
    return v


def parse_range(text: str, top: int) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise UsageError(f"range must look like a..b, got {text!r}") from None
    if not 0 <= a <= b <= top:
        raise UsageError(f"range {text} must lie within 0..{top}")
    return range(a, b + 1)


def default_start_level(graph: GradedGraph) -> int:
    """Lowest level with more than one vertex; the discrete metric is started there."""
    for n in range(1, graph.depth + 1):
        if graph.level_size(n) > 1:
            return n
    return 1


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer, got {value}")
    return value


def _out_dir(args: argparse.Namespace) -> Path:
    return Path(args.out if args.out is not None else f"bratteli-out/{args.command}")


def _prepare(args: argparse.Namespace, out: Path, config: RunConfig) -> None:
    """Validation is over: errors from here on are computation failures."""
    args.computing = True
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", config.echo())


# -- metric ----------------------------------------------------------------------


def cmd_metric(args: argparse.Namespace) -> int:
    graph = resolve_graph(args.graph, args.depth)
    depth = graph.depth if args.depth is None else args.depth
    start = default_start_level(graph) if args.start_level is None else args.start_level
    if not 1 <= start <= depth:
        raise UsageError(f"--start-level must be in 1..{depth}")
    out = _out_dir(args)
    config = RunConfig("metric", args.graph, depth, str(out), args.mode, args.seed, {"start_level": start})

    _prepare(args, out, config)
    metric = IntrinsicMetric(graph, args.mode, seed=start if start > 1 else None)
    rows, classes = [], []
    print(f"{'level':>5} {'size':>6} {'mode':>6} {'diam':>12} {'classes':>8}")
    for n in range(1, depth + 1):
        level = metric.level(n)
        write_level_metric_csv(out / f"level_{n:03d}.csv", graph, level)
        diam = level.diameter()
        rows.append((n, graph.level_size(n), level.mode, diam))
        count = ""
        if level.mode == "exact":
            found = metric.zero_classes(n)
            labels = graph.labels(n)
            classes.append({"level": n, "classes": [[plain(labels[i]) for i in g] for g in found.classes]})
            count = str(len(found.classes))
        shown = fmt(diam) if isinstance(diam, Fraction) else f"{float(diam):.6g}"
        print(f"{n:>5} {graph.level_size(n):>6} {level.mode:>6} {shown:>12} {count:>8}")
    write_csv(out / "diameters.csv", ["level", "size", "mode", "diameter"], rows)
    write_json(out / "zero_classes.json", classes)
    return 0


# -- measure ----------------------------------------------------------------------


def cmd_measure(args: argparse.Namespace) -> int:
    if args.anchor is None and args.path is None:
        raise UsageError("measure needs --anchor or --path")
    if args.anchor is not None and args.path is not None:
        raise UsageError("give either --anchor or --path, not both")
    if args.anchor is not None:
        return _measure_anchor(args)
    return _measure_path(args)


def _measure_anchor(args: argparse.Namespace) -> int:
    level_text = args.anchor.split(":")[0]
    depth = args.depth
    if depth is None and not args.graph.startswith("file:"):
        try:
            depth = max(int(level_text), 1)
        except ValueError:
            raise UsageError(f"anchor must look like LEVEL:INDEX, got {args.anchor!r}") from None
    graph = resolve_graph(args.graph, depth)
    anchor = parse_anchor(args.anchor, graph)
    levels = parse_range(args.marginals, anchor.level) if args.marginals else range(0, anchor.level + 1)
    m = min(anchor.level, 3) if args.cylinder_depth is None else args.cylinder_depth
    if m > anchor.level:
        raise UsageError(f"--cylinder-depth {m} exceeds the anchor level {anchor.level}")
    out = _out_dir(args)
    params = {"anchor": [anchor.level, anchor.index], "marginals": [levels.start, levels.stop - 1], "cylinder_depth": m}
    config = RunConfig("measure", args.graph, graph.depth, str(out), args.mode, args.seed, params)

    _prepare(args, out, config)
    approx = CentralMeasureApprox(graph, anchor)
    tables = [marginal_table(graph, anchor, approx.marginal(n)) for n in levels]
    write_json(out / "marginals.json", tables)
    cylinders = list(graph.iter_paths(m))
    probs = [approx.cylinder(FinitePath(c)) for c in cylinders]
    write_json(out / "cylinders.json", cylinder_table(graph, anchor, cylinders, probs))
    print(f"anchor {label_str(graph.label(anchor))} at level {anchor.level}")
    for table in tables:
        entries = "  ".join(f"{label_str(tuple(e['vertex']))}:{e['p']}" for e in table["entries"])
        print(f"  level {table['level']}: {entries}")
    return 0


def _measure_path(args: argparse.Namespace) -> int:
    if args.depth is None:
        raise UsageError("--depth is required with --path")
    graph = resolve_graph(args.graph, args.depth)
    path = parse_path_spec(graph, args.path, args.depth)
    m = 5 if args.cylinder_depth is None else args.cylinder_depth
    if m >= args.depth:
        raise UsageError(f"--cylinder-depth {m} must be below --depth {args.depth}")
    reg_depth = min(args.depth, REGULARITY_DEPTH_CAP) if args.regularity_depth is None else args.regularity_depth
    do_regularity = not args.no_regularity
    if do_regularity and not 1 <= args.window <= reg_depth:
        raise UsageError(f"--window must be in 1..{reg_depth}")
    if do_regularity and not 1 <= reg_depth <= args.depth:
        raise UsageError(f"--regularity-depth must be in 1..{args.depth}")
    target = None
    kind, _, arg = args.path.partition(":")
    if kind == "freq" and graph.name == "pascal:2":
        target = Fraction(arg)
    out = _out_dir(args)
    params = {
        "path": args.path,
        "cylinder_depth": m,
        "regularity": do_regularity,
        "regularity_depth": reg_depth,
        "window": args.window,
        "tolerance": args.tolerance,
        "burn_in": args.burn_in,
    }
    config = RunConfig("measure", args.graph, args.depth, str(out), args.mode, args.seed, params)

    _prepare(args, out, config)
    est = estimate_limit_measure(graph, path, m)
    final = est.rows[-1]
    table = cylinder_table(graph, path.end, est.cylinders, final)
    for entry, p in zip(table["entries"], final):
        entry["p_float"] = float(p)
    write_json(out / "cylinders.json", table)

    bern = [bernoulli_cylinder(graph, c, target) for c in est.cylinders] if target is not None else None
    header = ["level", "max_change"] + (["max_deviation"] if bern else [])
    stab = []
    for k, n in enumerate(est.levels):
        row: list[Any] = [n, est.changes[k - 1] if k else 0.0]
        if bern:
            row.append(max(abs(float(x - y)) for x, y in zip(est.rows[k], bern)))
        stab.append(row)
    write_csv(out / "stabilization.csv", header, stab)
    print(f"path {args.path} to depth {args.depth}, cylinder depth {m}: {len(est.cylinders)} cylinders")
    if bern:
        write_csv(
            out / "definetti.csv",
            ["cylinder", "estimate", "bernoulli", "deviation"],
            (
                ["-".join(label_str(graph.label(v)) for v in c), float(p), float(b), abs(float(p - b))]
                for c, p, b in zip(est.cylinders, final, bern)
            ),
        )
        print(f"  max deviation from Bernoulli({target}): {stab[-1][2]:.3e}")

    if do_regularity:
        report = regularity_report(
            graph, path.prefix(reg_depth), window=args.window, tolerance=args.tolerance, burn_in=args.burn_in
        )
        write_csv(out / "regularity.csv", ["start", "gap"], zip(report.starts, report.gaps))
        post = report.post_burn_in()
        summary = {
            "depth": reg_depth,
            "window": report.window,
            "tolerance": report.tolerance,
            "burn_in": report.burn_in,
            "mode": report.mode,
            "regular": report.verdict,
            "max_gap_after_burn_in": max(post) if post else None,
            "min_gap_after_burn_in": min(post) if post else None,
        }
        write_json(out / "regularity.json", summary)
        verdict = "regular" if report.verdict else "not regular"
        print(f"  regularity to depth {reg_depth}: {verdict} (max post-burn-in gap {summary['max_gap_after_burn_in']})")
    return 0


# -- graph-export / selftest -------------------------------------------------------


def cmd_graph_export(args: argparse.Namespace) -> int:
    graph = resolve_graph(args.graph, args.depth)
    out = _out_dir(args)
    config = RunConfig("graph-export", args.graph, graph.depth, str(out), args.mode, args.seed)
    _prepare(args, out, config)
    write_json(out / "graph.json", graph.to_document())
    print(f"{graph.name}: {graph.depth} levels, sizes {graph.level_sizes()} -> {out / 'graph.json'}")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    from .checks import CHECKS, CheckResult, run_check

    names = args.filter or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise UsageError(f"unknown check(s) {unknown}; choose from {list(CHECKS)}")
    if not 0 < args.scale <= 1:
        raise UsageError("--scale must be in (0, 1]")
    passed = 0
    for name in names:
        result = run_check(name, scale=args.scale, seed=args.seed)
        passed += result.passed
        print(result.line(), flush=True)
    print(f"{passed}/{len(names)} checks passed")
    if args.force_fail:
        print(CheckResult("forced-failure", False, "requested with --force-fail").line())
        return 2
    return 0 if passed == len(names) else 2


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bratteli", description="Intrinsic metrics and central measures on graded graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, graph_required: bool = True) -> None:
        p.add_argument("--graph", required=graph_required, help="pascal:d, young or file:PATH")
        p.add_argument("--depth", type=_positive, help="number of levels above the root")
        p.add_argument("--mode", choices=("exact", "float", "auto"), default="auto")
        p.add_argument("--out", help="output directory (default bratteli-out/COMMAND)")
        p.add_argument("--seed", type=int, default=0, help="random seed for randomized sweeps")

    p = sub.add_parser("metric", help="level distance matrices, diameters, zero classes")
    common(p)
    p.add_argument("--start-level", type=_positive, help="level carrying the discrete start metric")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("measure", help="central measures from an anchor or along a path")
    common(p)
    p.add_argument("--anchor", help="LEVEL:INDEX of the anchor vertex")
    p.add_argument("--path", help="freq:p/q, oscillate:a,b,blocklen or file:PATH")
    p.add_argument("--cylinder-depth", type=_nonneg)
    p.add_argument("--marginals", help="level range a..b for anchor marginals")
    p.add_argument("--window", type=_positive, default=20)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--burn-in", type=_nonneg)
    p.add_argument("--regularity-depth", type=_positive, help=f"default min(depth, {REGULARITY_DEPTH_CAP})")
    p.add_argument("--no-regularity", action="store_true")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("graph-export", help="write the graph as a JSON document")
    common(p)
    p.set_defaults(func=cmd_graph_export)

    p = sub.add_parser("selftest", help="run the acceptance checks at reduced scale")
    p.add_argument("--filter", action="append", help="run only this check (repeatable)")
    p.add_argument("--scale", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force-fail", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.computing = False
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bratteli: error: {exc}", file=sys.stderr)
        return 1
    except (BratteliError, ValueError, OSError) as exc:
        print(f"bratteli: error: {exc}", file=sys.stderr)
        return 2 if args.computing else 1
    except (ArithmeticError, MemoryError) as exc:
        print(f"bratteli: computation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
