import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bratteli import (
    IntrinsicMetric,
    VertexRef,
    adjacent_level_distance,
    build_pascal,
    build_young,
    level_metric,
    load_graph,
    path_distance,
    zero_classes,
)
from bratteli.graph import BoundsError, BratteliError
from bratteli.intrinsic import ModeError, UnreachableError, diameter_profile
from bratteli.measures import FinitePath, path_pair_distances

from conftest import at


def test_pascal_level2_example():
    g = build_pascal(2, 2)
    m = level_metric(g, 2, mode="exact")
    assert m(at(g, 0, 2).index, at(g, 1, 1).index) == Fraction(1, 2)


def test_level_one_is_discrete():
    for g in (build_pascal(3, 2), build_pascal(2, 1)):
        m = level_metric(g, 1).matrix
        size = g.level_size(1)
        assert all(m[i, j] == (i != j) for i in range(size) for j in range(size))


def test_pascal_isometry_level_10():
    m = level_metric(build_pascal(2, 10), 10, mode="exact").matrix
    assert all(m[i, j] == Fraction(abs(i - j), 10) for i in range(11) for j in range(11))
    assert all(isinstance(x, Fraction) for x in m.flat)


def test_adjacent_examples():
    g = build_pascal(2, 3)
    assert adjacent_level_distance(g, at(g, 1, 0), at(g, 1, 1)) == Fraction(1, 2)
    assert adjacent_level_distance(g, at(g, 0, 1), at(g, 2, 0)) == 1
    assert adjacent_level_distance(g, at(g, 2, 0), at(g, 3, 0)) == 0


def test_adjacent_level_check():
    g = build_pascal(2, 3)
    with pytest.raises(BoundsError):
        adjacent_level_distance(g, at(g, 1, 0), at(g, 1, 2))


def test_path_examples():
    g = build_pascal(2, 3)
    assert path_distance(g, VertexRef(0, 0), at(g, 2, 0)) == 0
    assert path_distance(g, at(g, 1, 0), at(g, 1, 2)) == Fraction(2, 3)
    assert path_distance(g, at(g, 1, 0), at(g, 1, 1)) == adjacent_level_distance(g, at(g, 1, 0), at(g, 1, 1))


def _path_distance_by_enumeration(metric, z, v):
    g = metric.graph
    best = None
    for path in _paths_between(g, z, v):
        total = sum(metric.adjacent(a, b) for a, b in zip(path, path[1:]))
        best = total if best is None else min(best, total)
    return best


def _paths_between(g, z, v):
    if z.level == v.level:
        yield (z,) if z == v else None
        return
    for w in g.successors(z):
        for rest in _paths_between(g, w, v):
            if rest is not None:
                yield (z,) + rest


@settings(max_examples=40)
@given(st.data())
def test_path_distance_matches_enumeration(data):
    g = build_pascal(3, 6)
    metric = IntrinsicMetric(g, "exact")
    m = data.draw(st.integers(0, 5))
    n = data.draw(st.integers(m + 1, 6))
    z = VertexRef(m, data.draw(st.integers(0, g.level_size(m) - 1)))
    v = VertexRef(n, data.draw(st.integers(0, g.level_size(n) - 1)))
    paths = [p for p in _paths_between(g, z, v) if p is not None]
    if not paths:
        with pytest.raises(UnreachableError):
            metric.path_distance(z, v)
    else:
        assert metric.path_distance(z, v) == _path_distance_by_enumeration(metric, z, v)


def test_streaming_matches_path_distance():
    g = build_pascal(2, 30)
    path = FinitePath.from_indices(g, [n - n // 3 for n in range(31)])
    exact = IntrinsicMetric(g, "exact")
    streamed = path_pair_distances(g, path, window=6, metric=IntrinsicMetric(g, "exact"))
    for (k, l), value in streamed.items():
        assert value == exact.path_distance(path[k], path[l])
    floats = path_pair_distances(g, path, window=6)
    for key, value in floats.items():
        assert value == pytest.approx(float(streamed[key]), abs=1e-12)


def test_zero_classes_pascal_singletons():
    g = build_pascal(2, 20)
    for n in (1, 5, 20):
        assert all(len(c) == 1 for c in zero_classes(g, n).classes)


def test_zero_classes_shared_predecessor_distribution():
    # two level-2 vertices with the same predecessors and weights
    doc = {
        "name": "twins",
        "levels": [["r"], ["a", "b"], ["x", "y", "z"], ["t"]],
        "edges": [[[]], [[0], [0]], [[0, 1], [0, 1], [0]], [[0, 1, 2]]],
    }
    g = load_graph(doc)
    classes = zero_classes(g, 2)
    assert classes.classes == ((0, 1), (2,))
    assert classes.class_of(1) == (0, 1)


def test_zero_classes_need_exact():
    with pytest.raises(ModeError):
        IntrinsicMetric(build_pascal(2, 4), "float").zero_classes(3)


def test_diameter_profile():
    assert diameter_profile(build_pascal(2, 5), 5, mode="exact") == [1] * 5
    young = diameter_profile(build_young(8), 8, mode="exact")
    assert all(b <= a for a, b in zip(young, young[1:]))
    seeded = IntrinsicMetric(build_young(8), "exact", seed=2)
    assert seeded.first_level == 2
    profile = seeded.diameter_profile(8)
    assert len(profile) == 7 and all(b <= a for a, b in zip(profile, profile[1:]))


def test_one_vertex_levels_have_zero_diameter():
    g = build_young(3)
    assert level_metric(g, 1).diameter() == 0
    assert level_metric(g, 0).diameter() == 0


def test_seeded_young_is_nondegenerate():
    metric = IntrinsicMetric(build_young(6), "exact", seed=2)
    m = metric.level(6).matrix
    off = [m[i, j] for i, j in itertools.combinations(range(len(m)), 2)]
    assert min(off) > 0


def test_explicit_seed_matrix():
    g = build_pascal(2, 4)
    half = Fraction(1, 2)
    seed = (1, [[0, half], [half, 0]])
    m = IntrinsicMetric(g, "exact", seed=seed).level(4).matrix
    assert m[0, 4] == half


@pytest.mark.parametrize("seed", [(9, [[0]]), (1, [[0]])])
def test_bad_seeds(seed):
    with pytest.raises(BoundsError):
        IntrinsicMetric(build_pascal(2, 4), "exact", seed=seed)


def test_float_and_auto_agree_with_exact():
    g = build_pascal(3, 8)
    exact = IntrinsicMetric(g, "exact")
    floats = IntrinsicMetric(g, "float")
    for n in range(1, 9):
        np.testing.assert_allclose(floats.level(n).matrix, exact.level(n).as_float(), atol=1e-13)
    auto = IntrinsicMetric(build_pascal(3, 11), "auto")
    assert auto.level(9).mode == "exact"  # 55 vertices
    assert auto.level(10).mode == "float"  # 66 vertices
    assert auto.level(11).mode == "float"


def test_keep_evicts_without_recomputing():
    metric = IntrinsicMetric(build_pascal(2, 10), "exact", keep=2)
    metric.level(10)
    assert metric.level(9).level == 9
    with pytest.raises(BratteliError, match="evicted"):
        metric.level(3)


@settings(max_examples=30)
@given(st.integers(1, 7), st.data())
def test_young_triangle_and_symmetry(n, data):
    m = IntrinsicMetric(build_young(7), "exact", seed=2).level(max(n, 2)).matrix
    k = len(m)
    i, j, l = (data.draw(st.integers(0, k - 1)) for _ in range(3))
    assert m[i, j] == m[j, i] >= 0
    assert m[i, l] <= m[i, j] + m[j, l]
