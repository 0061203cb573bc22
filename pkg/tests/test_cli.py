import csv
import json
import subprocess
import sys

import pytest

from bratteli import build_young, load_graph
from bratteli.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_metric_pascal(tmp_path, capsys):
    out = tmp_path / "m"
    assert run("metric", "--graph", "pascal:2", "--depth", 10, "--mode", "exact", "--out", out) == 0
    assert len(list(out.glob("level_*.csv"))) == 10
    diam = read_csv(out / "diameters.csv")
    assert diam[0] == ["level", "size", "mode", "diameter"]
    assert [row[3] for row in diam[1:]] == ["1/1"] * 10
    config = json.loads((out / "config.json").read_text())
    assert config["version"] and config["command"] == "metric" and config["depth"] == 10
    classes = json.loads((out / "zero_classes.json").read_text())
    assert all(len(c) == 1 for level in classes for c in level["classes"])
    assert "1/1" in capsys.readouterr().out


def test_metric_young(tmp_path):
    out = tmp_path / "y"
    assert run("metric", "--graph", "young", "--depth", 6, "--out", out) == 0
    assert len(list(out.glob("level_*.csv"))) == 6
    assert json.loads((out / "config.json").read_text())["params"]["start_level"] == 2


def test_metric_depth_zero_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run("metric", "--graph", "pascal:2", "--depth", 0, "--out", tmp_path)
    assert exc.value.code == 1
    assert "positive" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["metric", "--graph", "hexagon", "--depth", 3],
        ["metric", "--graph", "pascal:x", "--depth", 3],
        ["metric", "--graph", "pascal:2"],
        ["metric", "--graph", "pascal:2", "--depth", 3, "--start-level", 5],
        ["measure", "--graph", "pascal:2", "--depth", 4],
        ["measure", "--graph", "pascal:2", "--depth", 4, "--anchor", "6:0"],
        ["measure", "--graph", "pascal:2", "--depth", 4, "--anchor", "x"],
        ["measure", "--graph", "pascal:2", "--anchor", "4:2", "--marginals", "3..9"],
        ["measure", "--graph", "pascal:2", "--depth", 8, "--path", "freq:1/3", "--cylinder-depth", 8],
        ["measure", "--graph", "pascal:2", "--depth", 8, "--path", "nope:1"],
        ["measure", "--graph", "file:/does/not/exist.json", "--depth", 3, "--anchor", "1:0"],
        ["selftest", "--filter", "no-such-check"],
    ],
)
def test_validation_errors_exit_1(argv, tmp_path):
    out = tmp_path / "o"
    assert run(*argv, *([] if argv[0] == "selftest" else ["--out", out])) == 1
    assert not (out / "config.json").exists()


def test_measure_anchor_marginals(tmp_path):
    out = tmp_path / "a"
    assert run("measure", "--graph", "pascal:2", "--anchor", "4:2", "--marginals", "0..4", "--out", out) == 0
    tables = json.loads((out / "marginals.json").read_text())
    assert [t["level"] for t in tables] == [0, 1, 2, 3, 4]
    assert [e["p"] for e in tables[2]["entries"]] == ["1/6", "2/3", "1/6"]
    assert tables[4]["entries"] == [{"vertex": [2, 2], "p": "1/1"}]
    cyl = json.loads((out / "cylinders.json").read_text())
    assert cyl["anchor"]["label"] == [2, 2] and cyl["level"] == 3


def test_measure_path(tmp_path):
    out = tmp_path / "p"
    argv = ["measure", "--graph", "pascal:2", "--path", "freq:1/3", "--depth", 600, "--cylinder-depth", 3]
    assert run(*argv, "--regularity-depth", 120, "--out", out) == 0
    cyl = json.loads((out / "cylinders.json").read_text())
    assert len(cyl["entries"]) == 8
    assert all("/" in e["p"] for e in cyl["entries"])
    dev = read_csv(out / "definetti.csv")
    assert max(float(r[3]) for r in dev[1:]) < 0.01
    stab = read_csv(out / "stabilization.csv")
    assert stab[0] == ["level", "max_change", "max_deviation"] and stab[-1][0] == "600"
    reg = json.loads((out / "regularity.json").read_text())
    assert reg["depth"] == 120 and reg["burn_in"] == 24 and reg["window"] == 20
    assert len(read_csv(out / "regularity.csv")) == 120 - 20 + 2


def test_measure_no_regularity(tmp_path):
    out = tmp_path / "p"
    argv = ["measure", "--graph", "pascal:2", "--path", "oscillate:1/3,2/3,4", "--depth", 50, "--no-regularity"]
    assert run(*argv, "--out", out) == 0
    assert not (out / "regularity.json").exists()
    assert not (out / "definetti.csv").exists()


def test_graph_export_round_trip(tmp_path):
    out = tmp_path / "g"
    assert run("graph-export", "--graph", "young", "--depth", 5, "--out", out) == 0
    doc = json.loads((out / "graph.json").read_text(encoding="utf-8"))
    assert load_graph(doc) == build_young(5)
    again = tmp_path / "g2"
    assert run("metric", "--graph", f"file:{out / 'graph.json'}", "--out", again) == 0
    assert len(list(again.glob("level_*.csv"))) == 5


def test_exact_runs_are_byte_identical(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert run("metric", "--graph", "pascal:3", "--depth", 5, "--mode", "exact", "--out", out, "--seed", 7) == 0
        assert run("measure", "--graph", "young", "--anchor", "5:2", "--out", out / "m") == 0
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
    assert files
    for rel in files:
        a, b = (outs[0] / rel).read_bytes(), (outs[1] / rel).read_bytes()
        if rel.name == "config.json":
            # the echoed output directory is the only difference
            a, b = a.replace(b"/a", b"/x"), b.replace(b"/b", b"/x")
        assert a == b, rel


def test_selftest_filter(capsys):
    assert run("selftest", "--filter", "pascal-isometry") == 0
    out = capsys.readouterr().out
    assert "pascal-isometry" in out and "1/1 checks passed" in out
    assert "transport" not in out


def test_selftest_force_fail():
    assert run("selftest", "--filter", "pascal-isometry", "--force-fail") == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bratteli", "measure", "--graph", "pascal:2", "--depth", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "--anchor or --path" in proc.stderr


def test_selftest_default_run_is_quick(capsys):
    import time

    start = time.perf_counter()
    status = run("selftest")
    elapsed = time.perf_counter() - start
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
    assert len(lines) == 8
    assert status == (0 if all(l.startswith("[PASS]") for l in lines) else 2)
    assert elapsed < 120
