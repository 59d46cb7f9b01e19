import json

import pytest

from sshgdefect import cli

REPORT_KEYS = {"schema_version", "check", "max_residual", "tolerance", "pass", "seed", "checks",
               "outputs", "values"}


def _report(d, name):
    return json.loads((d / f"{name}.json").read_text())


def test_verify_writes_schema_report(tmp_path, capsys):
    code = cli.main(["verify-pb", "--samples", "5", "--seed", "3", "--report-dir", str(tmp_path)])
    assert code == 0
    rep = _report(tmp_path, "verify-pb")
    assert REPORT_KEYS <= set(rep)
    assert rep["schema_version"] == cli.SCHEMA_VERSION and rep["check"] == "verify-pb"
    assert rep["pass"] is True and rep["seed"] == 3
    for c in rep["checks"]:
        assert {"name", "max_residual", "tolerance", "control", "pass"} <= set(c)
    assert "PASS pb.PB1_omega" in capsys.readouterr().out


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["verify-fusing", "--samples", "5", "--report-dir", str(d)]) == 0
    assert _report(a, "verify-fusing") == _report(b, "verify-fusing")


def test_report_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.REPORT_ENV, str(tmp_path))
    assert cli.main(["verify-laxpair", "--samples", "2"]) == 0
    assert (tmp_path / "verify-laxpair.json").exists()


def test_failing_check_exits_one(tmp_path):
    code = cli.main(["verify-defect", "--samples", "3", "--report-dir", str(tmp_path)])
    rep = _report(tmp_path, "verify-defect")
    failed = {c["name"] for c in rep["checks"] if not c["pass"]}
    assert code == 1 and rep["pass"] is False
    assert failed == {"limits.fermionic_PB2_f1t=+f1", "limits.fermionic_PB2_f1t=-f1"}


def test_tolerance_override_can_fail_a_suite(tmp_path):
    assert cli.main(["verify-pb", "--samples", "3", "--tolerance", "1e-30",
                     "--report-dir", str(tmp_path)]) == 1


def test_missing_mass_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": {"omega1": 1.0, "omega2": 1.0}}))
    assert cli.main(["verify-pb", "--config", str(cfg), "--report-dir", str(tmp_path)]) == 2
    assert "model.m: required field missing" in capsys.readouterr().err


@pytest.mark.parametrize("tree, path", [
    ({"model": {"m": "heavy"}}, "model.m"),
    ({"model": {"m": 1.0}, "grid": {"every": 2.5}}, "grid.every"),
    ({"model": {"m": 1.0}, "bogus": {}}, "bogus"),
    ({"model": {"m": 1.0, "mass": 2}}, "model.mass"),
])
def test_bad_config_values(tmp_path, capsys, tree, path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(tree))
    assert cli.main(["verify-pb", "--config", str(cfg), "--report-dir", str(tmp_path)]) == 2
    assert path in capsys.readouterr().err


def test_bad_flag_value(tmp_path):
    assert cli.main(["verify-pb", "--m", "abc", "--report-dir", str(tmp_path)]) == 2


def test_fused_form_rejected_for_simulation(tmp_path):
    assert cli.main(["simulate", "--sigma", "1.0", "--tau", "0.3",
                     "--report-dir", str(tmp_path)]) == 2


def test_complex_values_parse():
    cfg = cli.build_config("verify-pb", {"model": {"m": 1.0, "omega1": [1.0, 0.5], "omega2": "2-1j"}}, {})
    P = cfg.defect_params()
    assert P.omega1 == 1 + 0.5j and P.omega2 == 2 - 1j


def test_delay_playback(tmp_path, capsys):
    assert cli.main(["delay", "--report-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("z1 = ")
    rep = _report(tmp_path, "delay")
    assert rep["checks"][0]["name"] == "playback_fit" and rep["pass"]


def test_simulate_writes_outputs(tmp_path):
    code = cli.main(["simulate", "--L", "4", "--dx", "0.1", "--t0", "-0.5", "--t1", "0.5",
                     "--tolerance", "1e-2", "--report-dir", str(tmp_path)])
    rep = _report(tmp_path, "simulate")
    assert code == 0, rep
    assert (tmp_path / "simulate.csv").exists()
    assert (tmp_path / "simulate_checkpoint.json").exists()
    assert {c["name"] for c in rep["checks"]} >= {"drift_E_tot", "junction_residual"}
