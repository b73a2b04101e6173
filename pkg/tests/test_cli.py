import json
import os

import numpy as np
import pytest

from liecurv.cli import main, parse_matrix


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


LIGHT = ["--samples", "256", "--restarts", "6", "--iters", "40"]


def test_parse_matrix_forms(tmp_path):
    m = parse_matrix("diag:1,2,3")
    assert np.allclose(m, np.diag([1.0, 2, 3]))
    m = parse_matrix("1,0,0,0,1,0,0,0,1")
    assert np.allclose(m, np.eye(3))
    path = tmp_path / "m.json"
    path.write_text(json.dumps([[2.0, 0, 0], [0, 2.0, 0], [0, 0, 2.0]]))
    m = parse_matrix(f"@{path}")
    assert np.allclose(m, 2.0 * np.eye(3))
    with pytest.raises(ValueError):
        parse_matrix("1,2,3,4,5")  # not square
    with pytest.raises(ValueError):
        parse_matrix("diag:1,2,3,4")  # bad dimension
    asym = [0.0] * 36
    asym[1] = 1.0  # entry (0,1) without its mirror
    with pytest.raises(ValueError):
        parse_matrix(",".join(str(v) for v in asym))


def test_check_family_exits_zero(capsys):
    code, payload = run_cli(
        capsys, "check", "--family", "s3-action", "--a", "1", "--b", "1",
        "--lambda", "1,1,1", "--seed", "7", *LIGHT,
    )
    assert code == 0
    assert payload["schema_version"] == 1
    assert payload["results"][0]["verdict"] == "NonnegativeWithinBudget"


def test_check_negative_metric_exits_one(capsys):
    code, payload = run_cli(
        capsys, "check", "--phi", "diag:1.4,1,1,1,1,1", "--seed", "7", *LIGHT,
    )
    assert code == 1
    result = payload["results"][0]
    assert result["verdict"] == "NegativeWitness"
    assert result["witness"] is not None and len(result["witness"]) == 2


def test_check_three_dimensional_metric(capsys):
    code, payload = run_cli(capsys, "check", "--phi", "diag:1.2,1,1", "--seed", "1", *LIGHT)
    assert code == 0
    assert payload["results"][0]["min_value"] >= -1e-9


def test_invalid_inputs_exit_two(capsys):
    assert main(["check", "--phi", "diag:1,2"]) == 2
    assert main(["check", "--phi", "diag:1,1,1,1,1,-1"]) == 2  # not positive definite
    assert main(["check"]) == 2  # no metric given
    assert main(["reproduce", "--suite", "missing"]) == 2
    assert main(["path", "--family", "torus", "--c", "2", "--t-grid", "0.9"]) == 2
    capsys.readouterr()


def test_unknown_subcommand_exits_two():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_infinitesimal_family_flags(capsys):
    code, payload = run_cli(
        capsys, "infinitesimal", "--family", "torus", "--c", "0.5", "--d", "-0.2",
        "--a1", "0.3", "--a2", "0.9", "--a3", "0.4", "--seed", "2", *LIGHT,
    )
    assert code == 0
    assert abs(payload["results"][0]["min_value"]) < 1e-9


def test_path_scan_with_csv(capsys, tmp_path):
    csv = tmp_path / "scan.csv"
    code, payload = run_cli(
        capsys, "path", "--family", "s3-action", "--alpha", "0", "--beta", "0",
        "--lambda", "1,1,1.2", "--t-grid", "0.3,0.6", "--csv", str(csv),
        "--seed", "3", *LIGHT,
    )
    assert code == 0
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "t,min_value,verdict"
    assert len(lines) == 3
    assert all(line.endswith("NonnegativeWithinBudget") for line in lines[1:])
    assert [r["t"] for r in payload["results"]] == [0.3, 0.6]


def test_family_emits_matrix(capsys):
    code, payload = run_cli(
        capsys, "family", "--family", "torus", "--c", "1", "--d", "1", "--tau", "1,0.2,1",
    )
    assert code == 0
    mat = np.array(payload["results"][0]["matrix"])
    assert mat.shape == (6, 6)
    assert np.allclose(mat, mat.T)


def test_family_constraint_violation_exits_two(capsys):
    code = main(["family", "--family", "torus", "--c", "1", "--d", "1", "--tau", "1.5,0,1"])
    capsys.readouterr()
    assert code == 2


def test_reproduce_lists_required_suites(capsys):
    code, payload = run_cli(capsys, "reproduce", "--list")
    assert code == 0
    names = {row["suite"] for row in payload["results"]}
    assert {"lemma-2.2-fd", "example-2.3", "eq-yy", "th1-identities", "obs-3.2-paths"} <= names


def test_reproduce_suite_runs_and_passes(capsys):
    code, payload = run_cli(capsys, "reproduce", "--suite", "eq-yy", "--seed", "7")
    assert code == 0
    assert payload["results"][0]["pass"] is True
    assert all(row["value"] <= row["tol"] for row in payload["residuals"])


def test_every_suite_passes_within_time_budget():
    import time

    from liecurv.suites import SUITES, run_suite

    for name in SUITES:
        start = time.monotonic()
        result = run_suite(name, seed=7)
        elapsed = time.monotonic() - start
        assert result.passed, f"{name}: {[r.to_dict() for r in result.rows if not r.passed]}"
        assert elapsed < 60.0, f"{name} took {elapsed:.1f}s"


def test_output_file_and_seed_env(tmp_path, capsys, monkeypatch):
    out = tmp_path / "report.json"
    monkeypatch.setenv("LIECURV_SEED", "123")
    code = main(["check", "--phi", "diag:1,1,1,1,1,1", "-o", str(out), *LIGHT])
    capsys.readouterr()
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["seed"] == 123


def test_reports_roundtrip_and_are_deterministic(tmp_path, capsys):
    argv = ["check", "--phi", "diag:1.4,1,1,1,1,1", "--seed", "11", *LIGHT]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    main(argv + ["--workers", "1", "-o", str(out1)])
    main(argv + ["--workers", "4", "-o", str(out2)])
    capsys.readouterr()
    a = json.loads(out1.read_text())
    b = json.loads(out2.read_text())
    a.pop("wall_time_ms")
    b.pop("wall_time_ms")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
