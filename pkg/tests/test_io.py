import csv
import json
from fractions import Fraction

from bratteli import FinitePath, build_pascal, level_metric
from bratteli.io import (
    cylinder_table,
    fmt,
    label_str,
    marginal_table,
    parse_number,
    read_matrix_csv,
    write_csv,
    write_json,
    write_level_metric_csv,
)
from bratteli.measures import CentralMeasureApprox

from conftest import at


def test_number_round_trip():
    for x in (Fraction(3, 7), Fraction(-1, 2), Fraction(5), 0.1, 1e-300, 2 / 3):
        assert parse_number(fmt(x)) == x
    assert fmt(3) == "3/1"
    assert fmt("x") == "x"


def test_label_str():
    assert label_str((2, 1)) == "(2,1)"
    assert label_str(()) == "()"


def test_level_csv_round_trip(tmp_path):
    g = build_pascal(2, 4)
    metric = level_metric(g, 4, mode="exact")
    write_level_metric_csv(tmp_path / "m.csv", g, metric)
    header, rows = read_matrix_csv(tmp_path / "m.csv")
    assert header == ["(4,0)", "(3,1)", "(2,2)", "(1,3)", "(0,4)"]
    assert rows == metric.matrix.tolist()


def test_csv_is_rfc4180(tmp_path):
    write_csv(tmp_path / "t.csv", ["a", "b"], [[1, Fraction(1, 2)], ["x,y", 0.5]])
    raw = (tmp_path / "t.csv").read_bytes()
    assert raw == b'a,b\r\n1,1/2\r\n"x,y",0.5\r\n'
    assert list(csv.reader(raw.decode().splitlines())) == [["a", "b"], ["1", "1/2"], ["x,y", "0.5"]]


def test_measure_tables(tmp_path):
    g = build_pascal(2, 4)
    anchor = at(g, 2, 2)
    approx = CentralMeasureApprox(g, anchor)
    table = marginal_table(g, anchor, approx.marginal(2))
    assert table["level"] == 2
    assert table["anchor"] == {"level": 4, "index": 2, "label": [2, 2]}
    assert [e["p"] for e in table["entries"]] == ["1/6", "2/3", "1/6"]
    cyl = list(g.iter_paths(1))
    ct = cylinder_table(g, anchor, cyl, [approx.cylinder(FinitePath(c)) for c in cyl])
    assert [e["path"] for e in ct["entries"]] == [[[0, 0], [1, 0]], [[0, 0], [0, 1]]]
    write_json(tmp_path / "t.json", ct)
    assert json.loads((tmp_path / "t.json").read_text())["entries"][0]["p"] == "1/2"
