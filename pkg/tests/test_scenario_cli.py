import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from lndkit.cli import main
from lndkit.errors import ScenarioError
from lndkit.scenario import load_scenario, report_json, report_text, run

GOLDEN = Path(__file__).parent / "golden" / "model_d2.json"


def scenario(tasks, **extra):
    body = {"nvars": 2, "trunc_cap": 10, "derivations": {}, "endos": {}, "gradings": {}, "tasks": tasks}
    body.update(extra)
    return json.dumps(body)


def run_text(text, **kw):
    return run(*load_scenario(text), **kw)


def test_bundled_model_scenario(capsys):
    assert main(["run", "model_d2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "ALL_VERIFIED"
    assert report["convention"] == "pullback-compose: (a∘b)* = b*∘a*"
    assert all(t["passed"] for t in report["tasks"])
    assert all(t["micros"] is None for t in report["tasks"])


def test_golden_report(capsys):
    main(["run", "model_d2"])
    assert capsys.readouterr().out == GOLDEN.read_text(encoding="utf-8")


def test_failed_expectation_exits_one(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(scenario(
        [{"op": "equivalent", "args": {"left": "dx", "right": "dy"}, "expect": "EQUIVALENT"}],
        derivations={"dx": "[1, 0]", "dy": "[0, 1]"},
    ))
    assert main(["run", str(path)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "FAILURES"
    assert report["tasks"][0]["verdict"] == "NOT_EQUIVALENT"


@pytest.mark.parametrize("text", [
    "{not json",
    "[]",
    scenario([], extra_key=1),
    scenario([]),
    scenario([{"op": "no_such_op", "args": {}}]),
    scenario([{"op": "apply", "args": {"derivation": "[1, 0]"}}]),
    scenario([{"op": "apply", "args": {"derivation": "missing", "poly": "x1"}}]),
    scenario([{"op": "apply", "args": {"derivation": "[1, 0]", "poly": "x1", "extra": 1}}]),
    scenario([{"op": "check_poly", "args": {"poly": "x3"}}]),
    scenario([{"op": "check_poly", "args": {"poly": "x1"}}], trunc_cap=1),
    scenario([{"op": "check_poly", "args": {"poly": "x1"}}], endos={"bad": {"compose": []}}),
])
def test_schema_errors_exit_two_without_report(tmp_path, capsys, text):
    path = tmp_path / "s.json"
    path.write_text(text)
    assert main(["run", str(path)]) == 2
    out = capsys.readouterr()
    assert out.out == ""
    assert "error" in out.err


def test_missing_top_level_key():
    with pytest.raises(ScenarioError):
        load_scenario(json.dumps({"nvars": 2, "trunc_cap": 4, "tasks": []}))


def test_error_verdicts_use_codes():
    r = run_text(scenario([
        {"op": "exp_derivation", "args": {"derivation": "[x1, 0]"}, "expect": "NOT_EXPONENTIABLE"},
        {"op": "weight_polytope", "args": {"grading": [[1, 1]], "derivation": "[0, 0]"}},
    ]))
    assert [t["verdict"] for t in r["tasks"]] == ["NOT_EXPONENTIABLE", "ZERO_INPUT"]
    assert r["tasks"][0]["passed"] and not r["tasks"][1]["passed"]
    assert r["status"] == "FAILURES"


def test_value_expectations_compare_canonically():
    r = run_text(scenario([
        {"op": "apply", "args": {"derivation": "[x2^2, x1^2]", "poly": "x1 + x2"}, "expect": "x1^2+x2^2"},
        {"op": "lie_bracket", "args": {"left": "[0, 1]", "right": "[x2, 0]"}, "expect": "[1, 0]"},
        {"op": "check_poly", "args": {"poly": "(x1 - x2)*(x1 + x2)"}, "expect": "x1^2 - x2^2 + 1"},
    ]))
    assert [t["passed"] for t in r["tasks"]] == [True, True, False]


def test_partial_when_inconclusive():
    r = run_text(scenario([{"op": "is_lnd", "args": {"derivation": "[x2, 0]", "bound": 1}}]))
    assert r["tasks"][0]["verdict"] == "INCONCLUSIVE"
    assert r["status"] == "PARTIAL"


def test_endo_forms_and_names():
    r = run_text(scenario(
        [
            {"op": "compose", "args": {"left": "a", "right": "b"}, "expect": "[x + y^2, y]"},
            {"op": "h_operator", "args": {"endo": "c", "poly": "x"}, "expect": "y^2"},
            {"op": "algebraicity_probe", "args": {"endo": "t", "seed": "x", "budget": 3}},
            {"op": "group_commutator", "args": {"left": "e", "right": "e"}, "expect": "IDENTITY"},
        ],
        variables=["x", "y"],
        derivations={"shear": "[y^2, 0]"},
        endos={
            "a": "[x, y]",
            "b": {"exp": "shear"},
            "c": {"compose": ["a", "b"]},
            "t": {"images": "[x + y^2, y]", "cap": 8},
            "e": {"exp": "[0, x]", "t": "1/2"},
        },
    ))
    assert all(t["passed"] for t in r["tasks"]), r["tasks"]


def test_jobs_keep_declared_order():
    tasks = [{"name": f"t{k}", "op": "certify_not_locally_finite",
              "args": {"derivation": "[x2^2, x1^2]", "seed": "x1 + x2", "K": 3 + k}} for k in range(8)]
    text = scenario(tasks)
    serial = run_text(text)
    parallel = run_text(text, jobs=4)
    assert [t["name"] for t in parallel["tasks"]] == [f"t{k}" for k in range(8)]
    assert report_json(serial) == report_json(parallel)


def test_timings_recorded_on_request():
    r = run_text(scenario([{"op": "check_poly", "args": {"poly": "x1"}}]), timings=True)
    assert isinstance(r["tasks"][0]["micros"], int)


def test_text_and_json_agree_on_verdicts():
    bundled = resources.files("lndkit") / "scenarios" / "model_d2.json"
    r = run(*load_scenario(bundled.read_bytes()))
    text = report_text(r)
    for t in r["tasks"]:
        assert f"{t['name']}: {t['op']} -> {t['verdict']}" in text
    assert text.rstrip().endswith(f"status: {r['status']}")


def test_out_file_and_text_format(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "model_d2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "ALL_VERIFIED"
    assert "status: ALL_VERIFIED" in capsys.readouterr().out
    assert main(["run", "model_d2", "--format", "text"]) == 0
    assert capsys.readouterr().out.startswith("lndkit ")


def test_certify_command(capsys):
    assert main(["certify", "--d", "2", "--budget", "5", "--cap", "12"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "ALL_VERIFIED"
    assert report["sections"][0]["witness"]["orders"] == [1, 2, 3, 4, 5, 6, 7, 8]
    assert report["sections"][1]["witness"]["lhc_degrees"] == [1, 2, 3, 4, 5, 6]
    assert main(["certify", "--d", "3", "--budget", "5", "--cap", "11"]) == 2


def test_lift_and_check_commands(capsys):
    assert main(["lift", "--derivation", "[1, x1]", "--g0", "x2", "--cap", "8"]) == 0
    assert capsys.readouterr().out.strip() == "-1/2*x1^2 + x2"
    assert main(["check", "--poly", "(x1+x2)^2"]) == 0
    assert capsys.readouterr().out.strip() == "x1^2 + 2*x1*x2 + x2^2"
    assert main(["check", "--poly", "2x1"]) == 2
    assert "SYNTAX_ERROR" in capsys.readouterr().err
    assert main(["run"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lndkit", "check", "--poly", "x2 + x1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "x1 + x2"
