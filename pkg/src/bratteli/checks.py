"""Acceptance checks, shared by the test suite and ``bratteli selftest``.

Every check takes a ``scale`` in (0, 1]: 1 runs the full acceptance sizes,
smaller values shrink depths and sample counts for a quick self test. The
pass thresholds never change with the scale.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np
from scipy.stats import spearmanr

from .combinatorics import DiscreteMeasure
from .graph import VertexRef, build_pascal, build_young
from .intrinsic import IntrinsicMetric
from .measures import (
    CentralMeasureApprox,
    FinitePath,
    bernoulli_cylinder,
    estimate_limit_measure,
    project_measure,
    regularity_report,
)
from .oracles import transport_by_vertex_enumeration
from .paths import freq_path, oscillating_path
from .transport import CostMatrix, kantorovich, line_transport_oracle


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    elapsed: float = 0.0
    data: dict[str, Any] = field(default_factory=dict, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.summary} ({self.elapsed:.1f}s)"


def _scaled(full: int, scale: float, floor: int) -> int:
    return max(floor, int(round(full * scale)))


def pascal_isometry(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Pascal-2 levels are exactly the points i/n of [0, 1]."""
    top = _scaled(20, scale, 6)
    metric = IntrinsicMetric(build_pascal(2, top), "exact")
    bad = []
    for n in range(1, top + 1):
        m = metric.level(n).matrix
        if any(m[i, j] != Fraction(abs(i - j), n) for i in range(n + 1) for j in range(n + 1)):
            bad.append(n)
    summary = f"levels 1..{top} exact" if not bad else f"mismatch at levels {bad}"
    return CheckResult("pascal-isometry", not bad, summary, data={"levels": top, "bad": bad})


def hexagonal_distance(x: tuple[int, ...], y: tuple[int, ...], n: int) -> Fraction:
    """Hexagonal norm of (x - y)/n on the plane sum = 0: the largest coordinate gap."""
    return Fraction(max(abs(a - b) for a, b in zip(x, y)), n)


def pascal_hexagon(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Pascal-3 levels against the hexagonal-norm distances on {(i, j, k)/n}."""
    top = _scaled(10, scale, 6)
    graph = build_pascal(3, top)
    metric = IntrinsicMetric(graph, "exact")
    residuals = {}
    for n in range(4, top + 1):
        labels = graph.labels(n)
        rho = metric.level(n).matrix
        pairs = [(i, j) for i in range(len(labels)) for j in range(i + 1, len(labels))]
        r = np.array([float(rho[i, j]) for i, j in pairs])
        h = np.array([float(hexagonal_distance(labels[i], labels[j], n)) for i, j in pairs])
        s = float(r @ h / (h @ h))
        residuals[n] = (s, float(np.max(np.abs(r - s * h) / (s * h))))
    seq = [residuals[n][1] for n in sorted(residuals)]
    monotone = all(b <= a for a, b in zip(seq, seq[1:]))
    final = seq[-1]
    ok = monotone and final <= 0.05
    summary = f"max relative residual by level {[round(x, 4) for x in seq]}, scale {residuals[top][0]:.4f}"
    return CheckResult("pascal-hexagon", ok, summary, data={"residuals": residuals})


def _random_weights(rng: random.Random, k: int) -> list[Fraction]:
    den = rng.randint(k, 12)
    cuts = sorted(rng.sample(range(1, den), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return [Fraction(p, den) for p in parts]


def transport_correctness(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Network simplex against polytope-vertex enumeration and the line CDF formula."""
    rng = random.Random(seed)
    count = _scaled(200, scale, 20)
    mismatches = []
    for t in range(count):
        points = list(range(rng.randint(2, 8)))
        cost = [[Fraction(0)] * len(points) for _ in points]
        for i in points:
            for j in range(i + 1, len(points)):
                cost[i][j] = cost[j][i] = Fraction(rng.randint(0, 12), rng.randint(1, 6))
        cm = CostMatrix(tuple(points), cost)
        ka = rng.randint(1, min(4, len(points)))
        kb = rng.randint(1, min(4, len(points)))
        sa = sorted(rng.sample(points, ka))
        sb = sorted(rng.sample(points, kb))
        mu = DiscreteMeasure(tuple(sa), tuple(_random_weights(rng, ka)))
        nu = DiscreteMeasure(tuple(sb), tuple(_random_weights(rng, kb)))
        value, _ = kantorovich(cm, mu, nu, mode="exact")
        brute = transport_by_vertex_enumeration(mu.weights, nu.weights, [[cost[x][y] for y in sb] for x in sa])
        if value != brute:
            mismatches.append(("polytope", t, value, brute))
    for t in range(count):
        k = rng.randint(2, 8)
        positions = sorted({Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(k)})
        if len(positions) < 2:
            positions = [Fraction(0), Fraction(1)]
        cost = [[abs(p - q) for q in positions] for p in positions]
        cm = CostMatrix(tuple(positions), cost)
        ka = rng.randint(1, min(4, len(positions)))
        kb = rng.randint(1, min(4, len(positions)))
        mu = DiscreteMeasure(tuple(sorted(rng.sample(positions, ka))), tuple(_random_weights(rng, ka)))
        nu = DiscreteMeasure(tuple(sorted(rng.sample(positions, kb))), tuple(_random_weights(rng, kb)))
        value, _ = kantorovich(cm, mu, nu, mode="exact")
        line = line_transport_oracle(positions, mu, nu)
        if value != line:
            mismatches.append(("line", t, value, line))
    summary = f"{count} polytope + {count} line instances, {len(mismatches)} mismatches"
    return CheckResult("transport", not mismatches, summary, data={"mismatches": mismatches})


def _axiom_sweep(metric: IntrinsicMetric, levels: range, triples: int, rng: random.Random) -> list[str]:
    problems = []
    for n in levels:
        level = metric.level(n)
        if level.mode != "exact":
            problems.append(f"level {n} not exact")
            continue
        m = level.matrix
        size = level.size
        for _ in range(triples):
            i, j, k = (rng.randrange(size) for _ in range(3))
            if m[i, j] != m[j, i] or m[i, j] < 0 or m[i, i] != 0:
                problems.append(f"symmetry/positivity at level {n} ({i},{j})")
            if m[i, k] > m[i, j] + m[j, k]:
                problems.append(f"triangle at level {n} ({i},{j},{k})")
    diam = metric.diameter_profile(levels.stop - 1)
    if any(b > a for a, b in zip(diam, diam[1:])):
        problems.append(f"diameter profile increases: {diam}")
    return problems


def metric_axioms(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Symmetry, triangle inequality and shrinking diameters on random triples."""
    rng = random.Random(seed)
    triples = _scaled(1000, scale, 100)
    p2 = _scaled(20, scale, 8)
    p3 = _scaled(8, scale, 5)
    yg = _scaled(8, scale, 5)
    problems = []
    problems += _axiom_sweep(IntrinsicMetric(build_pascal(2, p2), "exact"), range(1, p2 + 1), triples, rng)
    problems += _axiom_sweep(IntrinsicMetric(build_pascal(3, p3), "exact"), range(1, p3 + 1), triples, rng)
    young = build_young(yg)
    problems += _axiom_sweep(IntrinsicMetric(young, "exact"), range(1, yg + 1), triples, rng)
    problems += _axiom_sweep(IntrinsicMetric(young, "exact", seed=2), range(2, yg + 1), triples, rng)
    summary = f"{triples} triples/level on pascal:2<={p2}, pascal:3<={p3}, young<={yg}; {len(problems)} violations"
    return CheckResult("metric-axioms", not problems, summary, data={"problems": problems[:20]})


def central_identities(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Additivity, normalisation, centrality and projection consistency, exactly."""
    rng = random.Random(seed)
    anchors = _scaled(50, scale, 8)
    top = _scaled(12, scale, 6)
    problems = []
    for graph in (build_pascal(2, top), build_pascal(3, top), build_young(top)):
        for _ in range(anchors):
            level = rng.randint(1, top)
            anchor = VertexRef(level, rng.randrange(graph.level_size(level)))
            cm = CentralMeasureApprox(graph, anchor)
            m = rng.randint(0, level - 1)
            paths = list(graph.iter_paths(m))
            probs = {p: cm.cylinder(FinitePath(p)) for p in paths}
            if sum(probs.values()) != 1:
                problems.append(f"{graph.name} {anchor}: length-{m} cylinders sum to {sum(probs.values())}")
            longer = {}
            for q in graph.iter_paths(m + 1):
                longer[q[:-1]] = longer.get(q[:-1], Fraction(0)) + cm.cylinder(FinitePath(q))
            for p in paths:
                if longer.get(p, Fraction(0)) != probs[p]:
                    problems.append(f"{graph.name} {anchor}: additivity fails at {p}")
            by_end: dict[VertexRef, set] = {}
            for p in paths:
                by_end.setdefault(p[-1], set()).add(probs[p])
            if any(len(v) > 1 for v in by_end.values()):
                problems.append(f"{graph.name} {anchor}: not central")
            for n in range(level):
                if project_measure(graph, cm.marginal(n + 1)) != cm.marginal(n):
                    problems.append(f"{graph.name} {anchor}: projection differs at level {n}")
    summary = f"{anchors} anchors per graph up to level {top}; {len(problems)} violations"
    return CheckResult("central-identities", not problems, summary, data={"problems": problems[:20]})


def de_finetti(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Cylinder estimates along frequency paths approach Bernoulli(p) products."""
    depth = _scaled(2000, scale, 200)
    early = depth // 4
    m = 5
    graph = build_pascal(2, depth)
    rows = {}
    ok = True
    for p in (Fraction(1, 3), Fraction(1, 2)):
        est = estimate_limit_measure(graph, freq_path(graph, p, depth), m)
        target = [bernoulli_cylinder(graph, c, p) for c in est.cylinders]

        def deviation(n: int) -> float:
            return max(abs(float(x - y)) for x, y in zip(est.row(n), target))

        final, before = deviation(depth), deviation(early)
        worst_c = max(deviation(n) * n / m**2 for n in est.levels if n >= 2 * m)
        rows[str(p)] = {"final": final, "early": before, "fitted_C": worst_c}
        ok = ok and final <= 0.01 and final < before
    summary = ", ".join(
        f"p={p}: dev@{depth}={r['final']:.2e} dev@{early}={r['early']:.2e} C={r['fitted_C']:.3f}" for p, r in rows.items()
    )
    return CheckResult("de-finetti", ok, summary, data=rows)


def regularity_discrimination(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """freq:1/3 should come out regular and oscillate:1/3,2/3 non-regular."""
    depth = _scaled(512, scale, 128)
    graph = build_pascal(2, depth)
    regular = regularity_report(graph, freq_path(graph, Fraction(1, 3), depth))
    wild = regularity_report(
        graph, oscillating_path(graph, Fraction(1, 3), Fraction(2, 3), 8, depth), metric=None
    )
    wild_gaps = wild.post_burn_in()
    wild_ok = min(wild_gaps) >= 0.2
    summary = (
        f"freq:1/3 max post-burn-in gap {max(regular.post_burn_in()):.4f} (need < 0.05), "
        f"oscillate min post-burn-in gap {min(wild_gaps):.4f} (need >= 0.2); "
        f"window {regular.window}, burn-in {regular.burn_in}, depth {depth}"
    )
    return CheckResult(
        "regularity",
        regular.verdict and wild_ok,
        summary,
        data={"regular": regular, "oscillating": wild},
    )


def frequency_vector(partition: tuple[int, ...], n: int) -> np.ndarray:
    """Row and column lengths of a diagram divided by its size, zero padded."""
    rows = np.zeros(n)
    cols = np.zeros(n)
    rows[: len(partition)] = partition
    for j in range(partition[0] if partition else 0):
        cols[j] = sum(1 for part in partition if part > j)
    return np.concatenate([rows, cols]) / n


def young_frequencies(scale: float = 1.0, seed: int = 0) -> CheckResult:
    """Rank correlation of intrinsic distance with row/column frequency distance."""
    top = _scaled(10, scale, 7)
    graph = build_young(top)
    # level 1 of the Young graph is a single point, so start from level 2
    metric = IntrinsicMetric(graph, "exact", seed=2)
    scatter = []
    per_level = {}
    for n in range(2, top + 1):
        labels = graph.labels(n)
        rho = metric.level(n).matrix
        freq = [frequency_vector(lab, n) for lab in labels]
        pts = [
            (n, i, j, float(rho[i, j]), float(np.abs(freq[i] - freq[j]).sum()))
            for i in range(len(labels))
            for j in range(i + 1, len(labels))
        ]
        scatter += pts
        if len(pts) > 2:
            per_level[n] = float(spearmanr([p[3] for p in pts], [p[4] for p in pts])[0])
    corr = float(spearmanr([p[3] for p in scatter], [p[4] for p in scatter])[0])
    summary = f"pooled Spearman {corr:.4f} over {len(scatter)} pairs (need >= 0.9); per level " + ", ".join(
        f"{n}:{c:.3f}" for n, c in per_level.items()
    )
    return CheckResult("young-frequencies", corr >= 0.9, summary, data={"scatter": scatter, "per_level": per_level})


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "pascal-isometry": pascal_isometry,
    "pascal-hexagon": pascal_hexagon,
    "transport": transport_correctness,
    "metric-axioms": metric_axioms,
    "central-identities": central_identities,
    "de-finetti": de_finetti,
    "regularity": regularity_discrimination,
    "young-frequencies": young_frequencies,
}


def run_check(name: str, scale: float = 1.0, seed: int = 0) -> CheckResult:
    start = time.perf_counter()
    result = CHECKS[name](scale=scale, seed=seed)
    result.elapsed = time.perf_counter() - start
    return result
