import json
import math

import pytest

from spacetime_lcst import harness


def test_report_status():
    assert harness.report("x", "a", 1e-12, 1e-10).status == "pass"
    assert harness.report("x", "a", 1e-3, 1e-10).status == "fail"
    r = harness.report("x", "a", 1e-3, 1e-10, deviation=True)
    assert r.status == "expected-deviation" and not r.passed
    assert harness.report("x", "a", math.inf, 1.0).to_dict()["residual"] == "inf"


def test_algebra_suite_summary_and_json(tmp_path):
    result = harness.run_all("algebra", seed=3)
    s = result["summary"]
    assert s["suite"] == "algebra" and s["total"] == len(result["reports"]) > 10
    assert s["passed"] == s["total"] and s["failed"] == 0
    assert harness.exit_code(result) == 0
    path = tmp_path / "r.json"
    harness.write_report(result, path)
    back = json.loads(path.read_text())
    assert back["summary"]["total"] == s["total"]
    assert set(back["reports"][0]) >= {"check_name", "anchor", "residual", "tolerance", "passed", "status"}


def test_exit_code_follows_failures():
    assert harness.exit_code({"summary": {"failed": 2}}) == 1
    assert harness.exit_code({"summary": {"failed": 0}}) == 0


def test_unknown_suite_or_mode():
    with pytest.raises(ValueError):
        harness.run_all("nope")
    with pytest.raises(ValueError):
        harness.run_all("algebra", mode="nope")


@pytest.mark.filterwarnings("ignore::spacetime_lcst.grid.ContainmentWarning")
def test_verbatim_mode_marks_printed_constants_as_deviations():
    reports = {r.check_name: r for r in harness.check_covariances(mode="verbatim")}
    assert reports["translation"].status == "expected-deviation"
    assert harness.check_covariances(mode="corrected")[1].status == "pass"
    inv = [r for r in harness.check_inversions(mode="verbatim") if r.check_name == "two_sided_roundtrip_verbatim"]
    assert len(inv) == 1 and inv[0].status == "expected-deviation"


def test_seeds_are_reproducible():
    a = harness.run_all("algebra", seed=7)["reports"]
    b = harness.run_all("algebra", seed=7, threads=2)["reports"]
    assert [r["residual"] for r in a] == [r["residual"] for r in b]
