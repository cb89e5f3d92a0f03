import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from twocenters import acceptance, cli, dynamics, potential


def run(capsys, *argv):
    status = cli.main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def table(out):
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_summary_csv(capsys):
    status, out, _ = run(capsys, "summary", "--m1", "80", "--m2", "0", "--eps", "8")
    assert status == 0
    assert "# m1=80" in out
    row = table(out)[0]
    assert float(row["c0"]) == pytest.approx(-65.0)
    assert row["holds"] == "false"


def test_critical_points_json(capsys):
    status, out, _ = run(capsys, "critical-points", "--m1", "1", "--m2", "1", "--eps", "1",
                         "--format", "json")
    assert status == 0
    doc = json.loads(out)
    assert doc["config"]["command"] == "critical-points"
    assert len(doc["rows"]) == 5
    xs = sorted(r["q1"] for r in doc["rows"] if r["q2"] == 0)
    assert xs[0] == pytest.approx(-1.4285855517290798, abs=1e-12)


def test_numbers_round_trip(capsys):
    _, out, _ = run(capsys, "critical-points", "--m1", "1", "--m2", "0.5", "--eps", "0.3")
    rows = table(out)
    pts = potential.find_critical_points(potential.MassParams(1, 0.5, 0.3))
    assert sorted(float(r["value"]) for r in rows) == sorted(p.value for p in pts)


def test_missing_required_value(capsys):
    status, _, err = run(capsys, "profile", "--m1", "1")
    assert status == 2
    assert "--c is required" in err


def test_bad_number(capsys):
    status, _, err = run(capsys, "summary", "--m1", "one")
    assert status == 2


def test_unknown_flag(capsys):
    status, _, _ = run(capsys, "summary", "--mass", "1")
    assert status == 2


def test_domain_error_exit_status(capsys):
    status, out, err = run(capsys, "profile", "--m1", "1", "--m2", "0.5", "--eps", "8",
                           "--c", "-1")
    assert status == 1
    assert err.startswith("LevelInadmissible:")
    assert out == ""


def test_unsupported_regime(capsys):
    status, _, err = run(capsys, "summary", "--m1", "-1")
    assert status == 1
    assert err.startswith("RegimeUnsupported:")


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[summary]\nm1 = 80\nm2 = 0\neps = 8\n")
    _, out, _ = run(capsys, "summary", "--config", str(cfg))
    assert float(table(out)[0]["c0"]) == pytest.approx(-65.0)
    _, out, _ = run(capsys, "summary", "--config", str(cfg), "--eps", "0")
    assert table(out)[0]["eps"] == "0"


def test_config_from_environment(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "env.ini"
    cfg.write_text("[summary]\nm1 = 2\nm2 = 1\n")
    monkeypatch.setenv("TWOCENTERS_CONFIG", str(cfg))
    _, out, _ = run(capsys, "summary")
    assert table(out)[0]["m1"] == "2"


def test_missing_config_file(capsys):
    status, _, _ = run(capsys, "summary", "--config", "/nonexistent/run.ini")
    assert status == 2


def test_tolerance_override_is_scoped(capsys):
    status, _, _ = run(capsys, "summary", "--tol", "deg_tol=1e-3", "--tol", "grad_tol=1e-8")
    assert status == 0
    assert potential.DEG_TOL == 1e-9 and potential.GRAD_TOL == 1e-10
    status, _, err = run(capsys, "summary", "--tol", "speed=3")
    assert status == 2 and "unknown tolerance" in err


def test_drift_tolerance_reaches_integrator(capsys, monkeypatch):
    seen = []
    real = dynamics.integrate_periods

    def spy(*args, **kwargs):
        seen.append(dynamics.DRIFT_TOL)
        return real(*args, **kwargs)

    monkeypatch.setattr(dynamics, "integrate_periods", spy)
    status, out, _ = run(capsys, "simulate", "--m1", "1", "--m2", "0.5", "--c", "-3",
                         "--periods", "5", "--tol", "drift_tol=1e-6")
    assert status == 0 and seen == [1e-6]
    row = table(out)[0]
    assert float(row["period"]) == pytest.approx(float(row["tau"]), rel=1e-5)


def test_out_file(tmp_path, capsys):
    target = tmp_path / "summary.csv"
    status, out, _ = run(capsys, "summary", "--out", str(target))
    assert status == 0 and out == ""
    assert "c_crit" in target.read_text()


def test_hill_mask(tmp_path, capsys):
    mask = tmp_path / "labels.npy"
    status, out, _ = run(capsys, "hill", "--m1", "1", "--m2", "0.5", "--eps", "0.5",
                         "--c", "-4", "--grid", "100", "--mask", str(mask))
    assert status == 0
    rows = table(out)
    labels = np.load(mask)
    assert labels.max() == len(rows) == int(rows[0]["component_count"])


def test_scan_range(capsys):
    status, out, _ = run(capsys, "scan", "--m1", "80", "--m2", "0,1", "--eps", "1:8:2")
    assert status == 0
    rows = table(out)
    assert [(r["m2"], r["eps"]) for r in rows] == [("0", "1"), ("0", "8"), ("1", "1"), ("1", "8")]
    assert rows[1]["holds"] == "false"


def test_classify(capsys):
    _, out, _ = run(capsys, "classify", "--m1", "1", "--m2", "-0.25", "--c", "-2.3",
                    "--samples", "24")
    assert table(out)[0]["convexity"] == "convex_toric"


def test_classify_warns_above_c0(capsys):
    status, _, err = run(capsys, "classify", "--m1", "1", "--m2", "0.5", "--c", "-2.5",
                         "--samples", "16")
    assert status == 1
    assert "warning: ConditionWarning" in err
    assert "NoTurningPoint:" in err


def test_euler_periods(capsys):
    status, out, _ = run(capsys, "euler-periods", "--m1", "1", "--m2", "0.5", "--c", "-3",
                         "--samples", "2", "--system", "nu")
    assert status == 0
    for r in table(out):
        assert float(r["max_rel_disagreement"]) < 1e-5
    status, _, _ = run(capsys, "euler-periods", "--eps", "1", "--c", "-3")
    assert status == 2


def test_verify_exit_status(capsys, monkeypatch):
    fake = [acceptance.CriterionResult(1, "a", True, "ok", 0.0),
            acceptance.CriterionResult(2, "b", False, "off", 0.0)]
    monkeypatch.setattr(acceptance, "run_all", lambda: fake)
    status, out, err = run(capsys, "verify")
    assert status == 1
    assert "[FAIL]" in err and "[PASS]" in err


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "twocenters.cli", "summary", "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["rows"][0]["holds"] is True
