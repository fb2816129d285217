"""CLI contract: subcommands, config execution, determinism, exit codes."""

import json
import math

import numpy as np
import pytest

from finslerproj.cli import build_metric, dump_json, run_args
from finslerproj.errors import ConfigError


class TestBasicCommands:
    def test_funk_interval_prints_value(self):
        code, text = run_args(["funk", "--interval", "--a", "0", "--b", "0.5",
                               "--k", "1"], capture=True)
        assert code == 0
        assert text.strip() == f"{math.log(2.0):.6f}"

    def test_funk_interval_eval(self):
        code, text = run_args(["funk", "--eval-u", "0.5", "--eval-y", "-1"],
                              capture=True)
        assert code == 0
        assert float(text) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_funk_ball_norm(self):
        code, text = run_args(["funk", "--metric", "funk-ball", "--x", "0.5", "0",
                               "--y", "1", "0"], capture=True)
        assert code == 0
        assert float(text) == pytest.approx(2.0)

    def test_validate_klein(self):
        code, text = run_args(["validate", "--metric", "klein", "--n", "2",
                               "--samples", "40", "--seed", "5"], capture=True)
        assert code == 0
        payload = json.loads(text)
        assert payload["homogeneity"]["passed"]
        assert payload["strong_convexity"]["passed"]

    def test_curvature_bound_pass(self):
        code, text = run_args(["curvature", "--metric", "klein", "--n", "2",
                               "--check-bound", "--c", "1", "--samples", "5"],
                              capture=True)
        assert code == 0
        payload = json.loads(text)
        assert payload["ricci_bound"]["passed"]
        assert abs(payload["ricci_bound"]["worst_normalized_eigenvalue"]) < 1e-4

    def test_curvature_bound_flagged(self):
        code, text = run_args(["curvature", "--metric", "euclidean", "--n", "2",
                               "--check-bound", "--c", "1", "--samples", "3"],
                              capture=True)
        assert code == 2

    def test_geodesic_connect(self):
        code, text = run_args(["geodesic", "--metric", "klein",
                               "--x0", "0", "0", "--x1", "0.5", "0",
                               "--connect"], capture=True)
        assert code == 0
        payload = json.loads(text)
        assert payload["length"] == pytest.approx(math.atanh(0.5), abs=1e-6)

    def test_geodesic_csv(self, tmp_path):
        path = tmp_path / "trace.csv"
        code, _ = run_args(["geodesic", "--metric", "funk-ball",
                            "--x0", "0", "0", "--y0", "1", "0",
                            "--length", "0.5", "--csv", str(path)], capture=True)
        assert code == 0
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "s,x1,x2,v1,v2,F"
        last = [float(v) for v in lines[-1].split(",")]
        assert last[-1] == pytest.approx(1.0, abs=1e-9)

    def test_projparam_csv(self, tmp_path):
        path = tmp_path / "par.csv"
        code, text = run_args(["projparam", "--metric", "klein",
                               "--x0", "0", "0", "--y0", "1", "0",
                               "--csv", str(path), "--grid", "41"], capture=True)
        assert code == 0
        payload = json.loads(text.split("s,")[0])
        assert payload["wronskian_drift"] <= 1e-8
        header = path.read_text().splitlines()[0]
        assert header == "s,q,w1,w2,pi"

    def test_pseudodist_corollary_flagged(self):
        code, text = run_args(["pseudodist", "--metric", "klein",
                               "--x0", "0", "0", "--x1", "0.5", "0",
                               "--check-corollary", "--c", "1.0"], capture=True)
        assert code == 2
        payload = json.loads(text)
        assert not payload["corollary"]["passed"]
        assert payload["corollary"]["passed_alternate"]

    def test_pseudodist_plain(self):
        code, text = run_args(["pseudodist", "--metric", "euclidean",
                               "--x0", "0", "0", "--x1", "0.5", "0"],
                              capture=True)
        assert code == 0
        payload = json.loads(text)
        assert payload["report"]["estimate"] <= 1e-9


class TestErrors:
    def test_unknown_subcommand(self, capsys):
        code, _ = run_args(["frobnicate"], capture=True)
        assert code == 1
        assert capsys.readouterr().err.startswith("error: config:")

    def test_domain_error_exit(self, capsys):
        code, _ = run_args(["funk", "--metric", "funk-ball",
                            "--x", "2", "0", "--y", "1", "0"], capture=True)
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:") and "\n" not in err.strip()

    def test_missing_flags(self):
        code, _ = run_args(["funk"], capture=True)
        assert code == 1

    def test_bad_config_file(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _ = run_args(["run", "--config", str(path)], capture=True)
        assert code == 1
        assert "config" in capsys.readouterr().err


class TestRunConfig:
    def test_config_matches_flags(self, tmp_path):
        config = {
            "metric": {"kind": "klein", "n": 2},
            "command": {"name": "curvature", "check_bound": True, "c": 1.0,
                        "samples": 5},
            "seed": 3,
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config))
        code_cfg, text_cfg = run_args(["run", "--config", str(path)], capture=True)
        code_flag, text_flag = run_args(
            ["curvature", "--metric", "klein", "--n", "2", "--check-bound",
             "--c", "1.0", "--samples", "5", "--seed", "3"], capture=True)
        assert code_cfg == code_flag == 0
        assert text_cfg == text_flag

    def test_quadratic_spec_through_config(self, tmp_path):
        config = {
            "metric": {"kind": "funk-quadratic",
                       "alpha": [[-1.0, 0.0], [0.0, -1.0]],
                       "beta": [0.0, 0.0], "gamma": 1.0, "k": 1.0},
            "command": {"name": "funk", "x": [0.5, 0.0], "y": [1.0, 0.0]},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config))
        code, text = run_args(["run", "--config", str(path)], capture=True)
        assert code == 0
        assert float(text) == pytest.approx(2.0)

    def test_missing_command_name(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"command": {}}))
        code, _ = run_args(["run", "--config", str(path)], capture=True)
        assert code == 1


class TestDeterminism:
    def test_byte_identical_reports(self):
        argv = ["validate", "--metric", "funk-ball", "--n", "2",
                "--samples", "50", "--seed", "11"]
        _, first = run_args(argv, capture=True)
        _, second = run_args(argv, capture=True)
        assert first == second

    def test_byte_identical_csv(self, tmp_path):
        texts = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            run_args(["geodesic", "--metric", "klein", "--x0", "0.1", "0",
                      "--y0", "1", "0.4", "--length", "1.0", "--csv", str(path)],
                     capture=True)
            texts.append(path.read_text())
        assert texts[0] == texts[1]


class TestBuildMetric:
    def test_kinds(self):
        assert build_metric("euclidean", 3).dimension == 3
        assert build_metric("klein", 2).name == "klein"
        assert build_metric("interval-funk", k=2.0).k == 2.0

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            build_metric("hyperbolic-cheese")

    def test_json_defaults(self):
        text = dump_json({"a": np.float64(1.5), "b": np.arange(3)})
        assert json.loads(text) == {"a": 1.5, "b": [0, 1, 2]}
