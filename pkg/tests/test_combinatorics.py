from fractions import Fraction
from math import comb, factorial, prod

import pytest
from hypothesis import given, strategies as st

from bratteli import VertexRef, build_pascal, build_young, dimension, predecessor_distribution, skew_dimension
from bratteli.combinatorics import DiscreteMeasure, MeasureError, dimensions, predecessor_weights_float
from bratteli.oracles import enumerate_paths_between, pascal_rule_binomials

from conftest import at


def hook_length(shape):
    """Number of standard tableaux of a shape, by the hook formula."""
    n = sum(shape)
    cols = [sum(1 for r in shape if r > j) for j in range(shape[0])] if shape else []
    hooks = prod(shape[i] - j + cols[j] - i - 1 for i in range(len(shape)) for j in range(shape[i]))
    return factorial(n) // hooks


def test_pascal_dimension_examples():
    g = build_pascal(2, 4)
    assert dimension(g, at(g, 2, 2)) == 6
    assert dimensions(g, 0) == {VertexRef(0, 0): 1}


def test_pascal_dimensions_are_binomials():
    g = build_pascal(2, 30)
    rows = pascal_rule_binomials(30)
    for n in range(31):
        assert [dimension(g, v) for v in g.vertices(n)] == rows[n]


def test_pascal3_dimensions_are_multinomials():
    g = build_pascal(3, 8)
    for v in g.vertices(8):
        i, j, k = g.label(v)
        assert dimension(g, v) == factorial(8) // (factorial(i) * factorial(j) * factorial(k))


def test_young_dimensions_match_hook_formula():
    g = build_young(12)
    assert dimension(g, at(g, 2, 1)) == 2
    for n in range(13):
        for v in g.vertices(n):
            assert dimension(g, v) == hook_length(g.label(v))


def test_sum_of_squares_is_factorial():
    g = build_young(10)
    assert sum(dimension(g, v) ** 2 for v in g.vertices(10)) == factorial(10)


def test_skew_examples():
    g = build_pascal(2, 4)
    assert skew_dimension(g, at(g, 1, 0), at(g, 3, 1)) == 3
    assert skew_dimension(g, at(g, 2, 0), at(g, 2, 2)) == 1
    u = at(g, 1, 1)
    assert skew_dimension(g, u, u) == 1
    assert skew_dimension(g, at(g, 2, 0), at(g, 0, 3)) == 0


@given(st.data())
def test_skew_matches_path_enumeration(data):
    g = build_young(7)
    m = data.draw(st.integers(0, 6))
    n = data.draw(st.integers(m, 7))
    u = VertexRef(m, data.draw(st.integers(0, g.level_size(m) - 1)))
    v = VertexRef(n, data.draw(st.integers(0, g.level_size(n) - 1)))
    assert skew_dimension(g, u, v) == len(enumerate_paths_between(g, u, v))


@given(st.integers(1, 9), st.data())
def test_path_decomposition(n, data):
    # every root-to-v path passes through exactly one vertex of each lower level
    g = build_pascal(3, 9)
    v = VertexRef(n, data.draw(st.integers(0, g.level_size(n) - 1)))
    m = data.draw(st.integers(0, n))
    total = sum(dimension(g, u) * skew_dimension(g, u, v) for u in g.vertices(m))
    assert total == dimension(g, v)


def test_pascal_skew_is_binomial():
    g = build_pascal(2, 12)
    u = at(g, 2, 3)
    for v in g.vertices(12):
        a, b = g.label(v)
        expected = comb(12 - 5, a - 2) if a >= 2 and b >= 3 else 0
        assert skew_dimension(g, u, v) == expected


def test_predecessor_distribution_examples():
    g = build_pascal(2, 3)
    nu = predecessor_distribution(g, at(g, 2, 1))
    assert nu.as_dict() == {at(g, 1, 1): Fraction(2, 3), at(g, 2, 0): Fraction(1, 3)}
    assert predecessor_distribution(g, at(g, 3, 0)) == DiscreteMeasure.dirac(at(g, 2, 0))
    y = build_young(3)
    nu = predecessor_distribution(y, at(y, 2, 1))
    assert nu.as_dict() == {at(y, 2): Fraction(1, 2), at(y, 1, 1): Fraction(1, 2)}


def test_predecessor_weights_float_agree():
    g = build_young(9)
    for n in range(1, 10):
        flat = predecessor_weights_float(g, n)
        exact = [w for v in g.vertices(n) for _, w in predecessor_distribution(g, v)]
        assert flat.tolist() == pytest.approx([float(x) for x in exact], rel=1e-15)


def test_root_has_no_distribution():
    with pytest.raises(ValueError):
        predecessor_distribution(build_pascal(2, 2), VertexRef(0, 0))


def test_measure_validation():
    with pytest.raises(MeasureError):
        DiscreteMeasure((1, 2), (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(MeasureError):
        DiscreteMeasure((2, 1), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(MeasureError):
        DiscreteMeasure((1, 2), (Fraction(1), Fraction(0)))
    m = DiscreteMeasure.from_mapping({3: Fraction(1, 4), 1: Fraction(3, 4), 2: 0})
    assert m.support == (1, 3) and m[2] == 0 and len(m) == 2
