import json

import pytest

from heatnash.cli import main
from heatnash.controls import read_control_csv
from heatnash.config import parse_config


@pytest.fixture
def demo(tmp_path):
    assert main(["demo", "--name", "default-1d", "--out", str(tmp_path / "demo")]) == 0
    return tmp_path / "demo" / "config.json"


def test_demo_then_nash(tmp_path, demo):
    out = tmp_path / "run"
    assert main(["nash", "--config", str(demo), "--out", str(out)]) == 0
    for name in ("u1.csv", "u2.csv", "residuals.csv", "saturation.csv", "summary.json", "config.json"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["result"]["converged"] is True
    assert summary["bang_bang"]["verdict"] != "neither"
    # the echoed config reproduces the run
    again = tmp_path / "again"
    assert main(["nash", "--config", str(out / "config.json"), "--out", str(again)]) == 0
    for name in ("u1.csv", "u2.csv", "residuals.csv", "saturation.csv"):
        assert (out / name).read_bytes() == (again / name).read_bytes()

    assert main(["verify", "--config", str(demo), "--controls", str(out), "--tol", "1e-5", "--probes", "64"]) == 0
    verify = json.loads((out / "verify" / "summary.json").read_text())
    assert verify["passed"] is True


def test_gradient_check(demo, capsys):
    assert main(["gradient-check", "--config", str(demo), "--player", "2", "--eps", "1e-5"]) == 0
    out = capsys.readouterr().out
    err = float(out.split("max relative error")[1].split()[0])
    assert err <= 1e-6


def test_forced_non_convergence(tmp_path, demo):
    out = tmp_path / "nc"
    assert main(["nash", "--config", str(demo), "--out", str(out), "--max-rounds", "0"]) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["result"]["converged"] is False
    assert (out / "u1.csv").exists() and (out / "residuals.csv").exists()


def test_jacobi_mode_and_overrides(tmp_path, demo):
    out = tmp_path / "jac"
    code = main(["nash", "--config", str(demo), "--out", str(out), "--mode", "jacobi",
                 "--relax", "0.9", "--tol", "1e-7", "--seed", "4"])
    assert code == 0
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["nash"]["mode"] == "jacobi" and cfg["nash"]["relax"] == 0.9
    assert cfg["nash"]["nash_tol"] == 1e-7 and cfg["seed"] == 4


def test_verify_fails_on_non_equilibrium(tmp_path, demo):
    out = tmp_path / "br"
    assert main(["best-response", "--config", str(demo), "--player", "1", "--out", str(out)]) == 0
    spec, _, _ = parse_config(demo)
    assert read_control_csv(out / "u1.csv", spec, 1).is_admissible()
    # player 2 plays zero, which is not its best response
    assert main(["verify", "--config", str(demo), "--controls", str(out), "--tol", "1e-5", "--probes", "4"]) == 4


def test_forward(tmp_path, demo):
    out = tmp_path / "fwd"
    assert main(["forward", "--config", str(demo), "--out", str(out)]) == 0
    lines = (out / "state.csv").read_text().splitlines()
    assert lines[0] == "k,t,node_index,value"
    assert len(lines) == 1 + 51 * 49
    assert json.loads((out / "summary.json").read_text())["command"] == "forward"


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"domain_length": 1}))
    assert main(["nash", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "required" in capsys.readouterr().err
    assert main(["nash", "--bogus-flag"]) == 2
    assert main([]) == 2
    assert main(["demo", "--name", "nope", "--out", str(tmp_path)]) == 2
