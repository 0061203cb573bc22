"""Acceptance criteria at full scale; each prints one PASS/FAIL line."""

import pytest

from bratteli.checks import CHECKS, run_check

TIME_LIMITS = {"pascal-isometry": 60, "transport": 30, "de-finetti": 60}


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name, capsys):
    result = run_check(name)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.summary
    if name in TIME_LIMITS:
        assert result.elapsed < TIME_LIMITS[name], f"took {result.elapsed:.1f}s"
