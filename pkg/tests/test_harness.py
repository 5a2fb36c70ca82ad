import os

import numpy as np
import pytest

from cgal import cli, harness


def test_config_parse_and_override():
    text = """
# experiment config
kind = ball_qp
n = 2
seed = 9   # inline comment
policy = short
tau = 0.6
z0 = 1.5,2.5
budget = 50
"""
    cfg = harness.parse_config_text(text)
    assert cfg.kind == "ball_qp"
    assert cfg.n == 2 and cfg.seed == 9 and cfg.budget == 50
    assert cfg.tau == 0.6
    assert cfg.z0 == [1.5, 2.5]


def test_config_rejects_unknown_key_and_bad_lines():
    with pytest.raises(ValueError, match="unknown key"):
        harness.parse_config_text("bogus = 1")
    with pytest.raises(ValueError, match="key=value"):
        harness.parse_config_text("just words")
    with pytest.raises(ValueError):
        harness.parse_config_text("budget = ten")


def test_config_echo_round_trip():
    cfg = harness.ExperimentConfig(kind="ball_qp", n=2, seed=3, tau=1.0 / 3.0, z0=[27.0, 27.0])
    echo = harness.config_echo(cfg)
    back = harness.parse_config_text("\n".join(echo.split(" ")))
    assert back == cfg


def test_presets_pin_reproduction_parameters():
    cfg = harness.apply_preset(harness.ExperimentConfig(), "paper-ol")
    assert (cfg.tau, cfg.gamma, cfg.p, cfg.alpha0) == (0.4, 0.01, 0.95, 1.0)
    assert cfg.z0 == [27.0, 27.0] and cfg.x0 == "barycenter"
    cfg = harness.apply_preset(harness.ExperimentConfig(), "paper-ss")
    assert cfg.policy == "short_warmstart"
    with pytest.raises(ValueError):
        harness.apply_preset(harness.ExperimentConfig(), "nope")


def test_trace_round_trip_exact(tmp_path):
    cfg = harness.ExperimentConfig(kind="ball_qp", n=2, seed=0, policy="short", budget=40, stride=7)
    _, trace = harness.run_experiment(cfg)
    path = tmp_path / "t.csv"
    harness.write_trace(path, trace, cfg)
    echo, back = harness.read_trace(path)
    assert echo == harness.config_echo(cfg)
    assert back == trace  # float fields round-trip bit-exactly at 17 digits


def test_trace_rejects_malformed_input():
    with pytest.raises(ValueError):
        harness.parse_trace_text("not a trace\n")
    good = f"{harness.TRACE_MAGIC}, x=1\n" + ",".join(harness.TRACE_COLUMNS) + "\n"
    harness.parse_trace_text(good)  # header-only is fine
    with pytest.raises(ValueError):
        harness.parse_trace_text(good + "1,2,3\n")


def test_determinism_byte_identical_without_wall_clock():
    cfg = harness.ExperimentConfig(kind="qcqp", n=4, m=2, seed=5, policy="short", budget=100, stride=10)
    _, t1 = harness.run_experiment(cfg)
    _, t2 = harness.run_experiment(cfg)
    s1 = harness.strip_wall_micros(harness.format_trace(t1, cfg))
    s2 = harness.strip_wall_micros(harness.format_trace(t2, cfg))
    assert s1 == s2


def test_trace_dir_env_override(monkeypatch):
    monkeypatch.delenv("CGAL_TRACE_DIR", raising=False)
    assert harness.trace_dir("/d") == "/d"
    monkeypatch.setenv("CGAL_TRACE_DIR", "/custom")
    assert harness.trace_dir("/d") == "/custom"


def test_instance_metadata_deterministic():
    cfg = harness.ExperimentConfig(kind="qcqp", n=3, m=2, seed=8)
    a = harness.instance_metadata_text(cfg, harness.build_problem(cfg))
    b = harness.instance_metadata_text(cfg, harness.build_problem(cfg))
    assert a == b
    assert "L_f=" in a and "B_0=" in a and "vertex_0=" in a


def test_cli_generate_and_rerun_byte_identical(tmp_path):
    out = str(tmp_path / "inst.cfg")
    assert cli.main(["generate", "--kind", "qcqp", "--n", "3", "--m", "1", "--seed", "4", "--out", out]) == 0
    first = open(out, "rb").read()
    assert cli.main(["generate", "--kind", "qcqp", "--n", "3", "--m", "1", "--seed", "4", "--out", out]) == 0
    assert open(out, "rb").read() == first


def test_cli_run_writes_trace(tmp_path):
    out = str(tmp_path / "run.csv")
    code = cli.main([
        "run", "--kind", "ball_qp", "--n", "2", "--seed", "0",
        "--policy", "short", "--budget", "20", "--stride", "5", "--out", out,
    ])
    assert code == 0
    echo, trace = harness.read_trace(out)
    assert trace[0].k == 0 and trace[-1].k == 20


def test_cli_run_budget_zero_single_row(tmp_path):
    out = str(tmp_path / "z.csv")
    assert cli.main(["run", "--kind", "ball_qp", "--n", "2", "--seed", "0", "--budget", "0", "--out", out]) == 0
    _, trace = harness.read_trace(out)
    assert len(trace) == 1


def test_cli_certify_pass_and_fail(tmp_path):
    # synthetic exact k^-1 trace: slack target passes, steep target fails
    cfg = harness.ExperimentConfig(kind="ball_qp", n=2, seed=0, budget=2000, stride=1)
    rows = [f"{harness.TRACE_MAGIC}, synthetic", ",".join(harness.TRACE_COLUMNS)]
    for k in range(0, 2001, 10):
        obj = 100.0 + 100.0 / max(k, 1)
        rows.append(f"{k},{obj:.17g},0,0,0,0,0.5,1,0.5,0,0")
    path = tmp_path / "syn.csv"
    path.write_text("\n".join(rows) + "\n")
    assert cli.main(["certify", "--trace", str(path), "--target", "-0.9", "--reference", "100.0"]) == 0
    assert cli.main(["certify", "--trace", str(path), "--target", "-1.1", "--reference", "100.0"]) == cli.EXIT_CERTIFY


def test_cli_proposition_single_point():
    code = cli.main(["proposition", "--single", "--kind", "prop21",
                     "--t1", "0.5", "--t2", "1.0", "--horizon", "100000"])
    assert code == 0
    # s violating the domain is a usage error
    code = cli.main(["proposition", "--single", "--kind", "prop22",
                     "--mu", "1.0", "--s", "2.5", "--horizon", "100000"])
    assert code == cli.EXIT_USAGE


def test_cli_usage_errors_exit_one():
    assert cli.main(["run", "--kind", "nope"]) == cli.EXIT_USAGE
    assert cli.main(["certify"]) == cli.EXIT_USAGE
    assert cli.main([]) == cli.EXIT_USAGE


def test_cli_run_jobs_multiple_seeds(tmp_path, monkeypatch):
    monkeypatch.setenv("CGAL_TRACE_DIR", str(tmp_path))
    code = cli.main([
        "run", "--kind", "ball_qp", "--n", "2", "--policy", "short",
        "--budget", "10", "--seeds", "1,2", "--jobs", "2",
    ])
    assert code == 0
    names = sorted(os.listdir(tmp_path))
    assert names == ["ball_qp_n2_s1_short.csv", "ball_qp_n2_s2_short.csv"]
