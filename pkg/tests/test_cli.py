import json

import pytest

from finsler_cone.cli import (
    EXIT_CHECKS_FAILED,
    EXIT_CONCAVE,
    EXIT_ERROR,
    EXIT_OK,
    FinslerConeCLI,
)


def run(capsys, *args):
    code = FinslerConeCLI().run(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == EXIT_OK
    names = [entry["name"] for entry in json.loads(out)]
    assert "ads" in names and "cylinder_strip" in names


def test_errors_are_reported_as_json_on_stderr(capsys):
    code, out, err = run(capsys, "catalog", "describe", "schwarzschild")
    assert code == EXIT_ERROR
    assert out == ""
    record = json.loads(err.strip().splitlines()[-1])
    assert record == {"command": "catalog", "error": "ModelDefinitionError", "message": record["message"]}
    assert "schwarzschild" in record["message"]


def test_missing_model_is_an_error(capsys):
    code, _, err = run(capsys, "inspect", "--point", "0,0,0", "--velocity", "1,0,0")
    assert code == EXIT_ERROR
    assert json.loads(err.strip().splitlines()[-1])["error"] == "ConfigError"


def test_inspect(capsys):
    code, out, _ = run(capsys, "inspect", "--model", "minkowski", "--point", "0,0.3", "--velocity", "2,1")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["fundamental_tensor"] == [[1.0, 0.0], [0.0, -1.0]]
    assert payload["sample"]["causal_class"] == "timelike"
    assert payload["spray"] == [0.0, 0.0]


def test_classify_boundary_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "classify-boundary", "--model", "stationary", "--grid", "6", "--dirs", "2")
    assert code == EXIT_OK
    assert json.loads(out)["summary"]["verdict"] == "convex"

    definition = tmp_path / "exterior.json"
    definition.write_text(json.dumps({"name": "exterior", "builtin": "stationary",
                                      "params": {"domain": "disk_exterior"}}), encoding="utf-8")
    code, out, _ = run(capsys, "classify-boundary", "--model", str(definition), "--grid", "6", "--dirs", "2",
                       "--format", "csv")
    assert code == EXIT_CONCAVE
    header, *rows = out.strip().splitlines()
    assert header == "point_index,direction_index,ii,verdict,error"
    assert len(rows) == 12


def test_shoot_writes_jsonl(capsys):
    code, out, _ = run(capsys, "shoot", "--model", "minkowski", "--point", "0,0", "--velocity", "1,0.5",
                       "--t-max", "2")
    assert code == EXIT_OK
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert records[-1]["summary"] is True
    assert records[-2]["x"] == pytest.approx([2.0, 1.0], abs=1e-9)


def test_shoot_batch_to_files(capsys, tmp_path):
    initial = tmp_path / "initial.json"
    initial.write_text(json.dumps([{"point": [0.0, 0.0], "velocity": [1.0, 0.1 * k]} for k in range(3)]),
                       encoding="utf-8")
    out = tmp_path / "runs" / "line.csv"
    code, _, _ = run(capsys, "shoot", "--model", "minkowski", "--initial", str(initial), "--t-max", "1",
                     "--format", "csv", "--out", str(out), "--jobs", "2")
    assert code == EXIT_OK
    assert sorted(p.name for p in out.parent.iterdir()) == ["line_0.csv", "line_1.csv", "line_2.csv"]
    assert (out.parent / "line_2.csv").read_text().startswith("t,x0,x1,v0,v1")


def test_detect_nonhausdorff_prints_none_without_certificate(capsys, tmp_path):
    definition = tmp_path / "minkowski3.json"
    definition.write_text(json.dumps({"name": "minkowski3", "builtin": "minkowski", "params": {"n": 2}}),
                          encoding="utf-8")
    code, out, _ = run(capsys, "detect-nonhausdorff", "--model", str(definition), "--construction", "cone_surface")
    assert code == EXIT_OK
    assert out == "none\n"


def test_verify_paper_exit_codes(capsys, tmp_path):
    report_path = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify-paper", "--only", "cylinder_lightspace", "--out", str(report_path))
    assert code == EXIT_OK
    report = json.loads(report_path.read_text())
    assert report["passed"] is True
    assert [c["name"] for c in report["checks"]] == ["cylinder_lightspace"]

    code, out, err = run(capsys, "verify-paper", "--only", "ads_second_fundamental_form", "--tol", "1e-20")
    assert code == EXIT_CHECKS_FAILED
    assert json.loads(out)["failed"] == ["ads_second_fundamental_form"]
    assert "ads_second_fundamental_form" in json.loads(err.strip().splitlines()[-1])["message"]


def test_same_seed_gives_identical_output(capsys):
    args = ("classify-boundary", "--model", "ads_conformal", "--grid", "4", "--dirs", "2", "--seed", "5")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_inspect_reports_the_float64_device(capsys):
    _, out, _ = run(capsys, "inspect", "--model", "ads", "--point", "0,0.5,0.3", "--velocity", "1,0.2,0.1")
    payload = json.loads(out)
    assert payload["device"]["dtype"] == "float64"
    assert len(payload["christoffel"]) == 3
