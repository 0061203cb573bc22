import json
from fractions import Fraction

import pytest

from bratteli import build_pascal, build_young
from bratteli.graph import BoundsError
from bratteli.measures import PathError
from bratteli.paths import freq_path, oscillating_path, parse_path_spec


def firsts(graph, path):
    return [graph.label(v)[0] for v in path.vertices]


def test_freq_path_floor():
    g = build_pascal(2, 12)
    path = freq_path(g, Fraction(1, 3), 12)
    assert firsts(g, path) == [n // 3 for n in range(13)]
    assert path.length == 12


def test_freq_path_on_pascal3_uses_two_coordinates():
    g = build_pascal(3, 5)
    path = freq_path(g, Fraction(1, 2), 5)
    assert g.label(path.end) == (2, 3, 0)


def test_oscillating_blocks():
    g = build_pascal(2, 60)
    path = oscillating_path(g, Fraction(0), Fraction(1), 4, 60)
    ups = [b - a for a, b in zip(firsts(g, path), firsts(g, path)[1:])]
    # blocks of length 4, 8, 16, 32 alternate between no ups and all ups
    assert ups[:4] == [0] * 4
    assert ups[4:12] == [1] * 8
    assert ups[12:28] == [0] * 16
    assert ups[28:60] == [1] * 32


def test_parse_specs(tmp_path):
    g = build_pascal(2, 6)
    assert parse_path_spec(g, "freq:1/2", 6) == freq_path(g, Fraction(1, 2), 6)
    assert parse_path_spec(g, "oscillate:1/3,2/3,2", 6).length == 6
    f = tmp_path / "p.json"
    f.write_text(json.dumps([[0, 0], [1, 0], [1, 1], 2, [2, 2], [3, 2], [3, 3], [4, 3]]))
    path = parse_path_spec(g, f"file:{f}", 6)
    assert path.length == 6 and g.label(path.end) == (3, 3)


@pytest.mark.parametrize("spec", ["freq", "walk:1", "oscillate:1/3,2/3", "freq:3/2"])
def test_bad_specs(spec):
    with pytest.raises((PathError, BoundsError, ValueError)):
        parse_path_spec(build_pascal(2, 6), spec, 6)


def test_file_path_must_be_a_path(tmp_path):
    g = build_pascal(2, 3)
    f = tmp_path / "p.json"
    f.write_text(json.dumps([[0, 0], [1, 0], [0, 2], [0, 3]]))
    with pytest.raises(PathError):
        parse_path_spec(g, f"file:{f}", 3)
    f.write_text(json.dumps([[0, 0], [1, 0]]))
    with pytest.raises(PathError):
        parse_path_spec(g, f"file:{f}", 3)


def test_freq_needs_pascal():
    with pytest.raises(PathError):
        freq_path(build_young(4), Fraction(1, 2), 4)
