import io
import json
import subprocess
import sys

import pytest

from qcfix.cli import run
from qcfix.spacespec import bundled_fixture, parse_space_spec


@pytest.fixture
def fixture_path(tmp_path):
    def make(name, text=None):
        path = tmp_path / name
        path.write_text(bundled_fixture(name) if text is None else text, encoding="utf-8")
        return str(path)

    return make


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--format", "json")
    return code, json.loads(out)


def test_validate(fixture_path):
    code, report = call_json("validate", fixture_path("separating_example.json"))
    assert code == 0
    assert report["payload"]["valid"] is True
    assert report["input_digest"].startswith("sha256:")


def test_validate_reports_violation(fixture_path):
    text = json.dumps(
        {"version": "1", "points": ["a", "b", "c"], "metric": {"kind": "matrix", "rows": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}}
    )
    code, report = call_json("validate", fixture_path("bad.json", text))
    assert code == 1
    p = report["payload"]
    assert p["valid"] is False
    assert p["axiom"] == "triangle inequality"
    assert p["witness"] == [0, 1, 2]


def test_classify_quasi_on_example(fixture_path):
    code, report = call_json("classify", fixture_path("separating_example.json"), "--terms", "quasi")
    assert code == 2
    (entry,) = report["payload"]["reports"]
    assert entry["minimal_q"] == 1.0
    assert entry["witness_labels"] == ["4", "5"]
    assert entry["contractive"] is False


def test_classify_default_is_generalized(fixture_path):
    code, report = call_json("classify", fixture_path("separating_example.json"))
    assert code == 0
    assert report["payload"]["reports"][0]["terms"] == "generalized"
    assert report["payload"]["reports"][0]["minimal_q"] == 0.5


def test_classify_all_and_custom(fixture_path):
    path = fixture_path("separating_example.json")
    code, report = call_json("classify", path, "--terms", "all")
    assert [r["terms"] for r in report["payload"]["reports"]] == ["banach", "kannan", "quasi", "generalized"]
    code, report = call_json("classify", path, "--terms", "custom:111110000")
    assert report["payload"]["reports"][0]["terms"] == "quasi"
    code, report = call_json("classify", path, "--terms", "custom:000001000")
    assert report["payload"]["reports"][0]["terms"] == "custom:000001000"


def test_classify_power(fixture_path):
    code, report = call_json("classify", fixture_path("separating_example.json"), "--power", "2")
    assert code == 0
    assert report["payload"]["reports"][0]["minimal_q"] == 0.0


def test_classify_multimap(fixture_path):
    code, report = call_json("classify", fixture_path("hub_multimap.json"))
    assert report["payload"]["map_kind"] == "multi"
    assert code == 0


def test_check_on_example(fixture_path):
    code, report = call_json("check", fixture_path("separating_example.json"))
    assert code == 0
    p = report["payload"]
    assert p["fixed_points"]["labels"] == ["1"]
    steps = {r["start_label"]: r["outcome"]["steps"] for r in p["runs"]}
    assert steps == {"1": 0, "2": 1, "3": 1, "4": 2, "5": 2}
    for run_ in p["runs"]:
        assert all(c["holds"] for c in run_["rate"] + run_["orbit_diameter"])
        assert run_["cauchy"]["failures"] == []


def test_check_not_contractive(fixture_path):
    text = json.dumps(
        {
            "version": "1",
            "points": ["a", "b"],
            "metric": {"kind": "matrix", "rows": [[0, 1], [1, 0]]},
            "map": {"kind": "single", "images": [1, 0]},
        }
    )
    code, report = call_json("check", fixture_path("swap.json", text))
    assert code == 2
    assert report["payload"]["verdict"] == "not contractive"
    assert report["payload"]["runs"][0]["outcome"]["kind"] == "cycle"


def test_check_multimap(fixture_path):
    code, report = call_json("check", fixture_path("hub_multimap.json"))
    assert code == 0
    assert report["payload"]["strict_fixed_points"]["labels"] == ["hub"]
    assert report["payload"]["selection"]["transfer_holds"]


def test_solve(fixture_path):
    code, report = call_json("solve", fixture_path("separating_example.json"), "--start", "3")
    assert code == 0
    (run_,) = report["payload"]["runs"]
    assert run_["step_labels"] == ["4", "2", "1", "1"]


def test_solve_reports_no_convergence(fixture_path):
    text = json.dumps(
        {
            "version": "1",
            "points": ["a", "b", "c"],
            "metric": {"kind": "matrix", "rows": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]},
            "map": {"kind": "single", "images": [1, 2, 2]},
        }
    )
    path = fixture_path("slow.json", text)
    code, report = call_json("solve", path, "--start", "0", "--max-iters", "1")
    assert code == 3
    assert report["payload"]["runs"][0]["outcome"]["kind"] == "max_iters_exceeded"
    assert call_json("solve", path, "--start", "0")[0] == 0


def test_mv_solve(fixture_path):
    code, report = call_json("mv-solve", fixture_path("separating_example.json"), "--start", "4", "--a", "0.5")
    assert code == 0
    (run_,) = report["payload"]["runs"]
    assert run_["step_labels"] == ["5", "3", "1", "1"]
    assert all(c["holds"] for c in run_["rate"])


def test_mv_solve_constant_map(fixture_path):
    code, report = call_json("mv-solve", fixture_path("triangle_graph.json"))
    assert code == 0
    assert report["payload"]["reports"][1]["minimal_q"] == 0.0


def test_bound(fixture_path):
    code, report = call_json("bound", fixture_path("separating_example.json"), "--n", "6")
    assert code == 0
    for run_ in report["payload"]["runs"]:
        assert len(run_["rate"]) == 7
        assert all(c["holds"] for c in run_["rate"])


def test_gen_is_deterministic():
    a = call("gen", "--points", "6", "--density", "0.8", "--seed", "42")
    b = call("gen", "--points", "6", "--density", "0.8", "--seed", "42")
    assert a[0] == 0 and a[1] == b[1]
    spec = parse_space_spec(a[1])
    assert len(spec.points) == 6


def test_gen_output_feeds_back(fixture_path):
    _, text, _ = call("gen", "--points", "5", "--seed", "3", "--map", "multi")
    code, report = call_json("classify", fixture_path("gen.json", text))
    assert report["payload"]["map_kind"] == "multi"


def test_json_report_is_canonical(fixture_path):
    path = fixture_path("separating_example.json")
    _, first, _ = call("check", path, "--format", "json")
    _, second, _ = call("check", path, "--format", "json")
    assert first == second
    assert first == json.dumps(json.loads(first), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["solve", "missing.json"], "missing.json"),
        (["solve", "{fx}", "--start", "9"], "--start 9"),
        (["classify", "{fx}", "--terms", "bogus"], "unknown term set 'bogus'"),
        (["classify", "{fx}", "--power", "0"], "--power 0"),
        (["mv-solve", "{fx}", "--a", "1.5"], "--a 1.5"),
        (["solve", "{multi}"], "map: solve needs a single-valued map"),
        (["gen", "--points", "0"], "--points 0"),
    ],
)
def test_input_errors(fixture_path, argv, fragment):
    fx = fixture_path("separating_example.json")
    multi = fixture_path("hub_multimap.json")
    argv = [a.format(fx=fx, multi=multi) for a in argv]
    code, _, err = call(*argv)
    assert code == 1
    assert fragment in err


def test_parse_error_exit_code(fixture_path):
    code, out, err = call("check", fixture_path("empty.json", '{"version": "1", "points": [], "metric": {}}'))
    assert code == 1
    assert "points: must be nonempty" in err


def test_tolerance_env_override(fixture_path, monkeypatch):
    monkeypatch.setenv("QCFIX_TOL", "0")
    assert call("check", fixture_path("separating_example.json"))[0] == 0
    monkeypatch.setenv("QCFIX_TOL", "abc")
    code, _, err = call("check", fixture_path("separating_example.json"))
    assert code == 1 and "QCFIX_TOL" in err


def test_text_output(fixture_path):
    code, out, _ = call("check", fixture_path("separating_example.json"))
    assert "fixed points: 1" in out
    assert "verdict: all certificates hold" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qcfix", "gen", "--points", "3", "--seed", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    parse_space_spec(proc.stdout)
