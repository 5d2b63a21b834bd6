import json
from pathlib import Path

import pytest

from lindblad_extrap.cli import (
    ConfigError,
    _load_fig_config,
    main,
    read_curve_csv,
    resolve_config,
    run_curve,
    run_extrapolation,
)

BASE_CONFIG = {
    "model": {"name": "random", "params": {"dim": 4}, "seed": 7},
    "integrator": "kraus",
    "total_time": 1.0,
    "grid": {"kind": "chebyshev", "n_nodes": 4, "interval": 0.02},
    "extrapolation": {"method": "richardson"},
    "shots": {"n_shots": 1000, "seed": 3, "mode": "born"},
}


def write_config(tmp_path, cfg=None) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg or BASE_CONFIG))
    return path


class TestConfig:
    def test_resolve_fills_defaults(self):
        cfg = resolve_config(json.loads(json.dumps(BASE_CONFIG)))
        assert cfg["extrapolation"]["degree"] is None
        assert cfg["shots"]["mode"] == "born"

    def test_missing_key(self):
        bad = {k: v for k, v in BASE_CONFIG.items() if k != "grid"}
        with pytest.raises(ConfigError, match="grid"):
            resolve_config(bad)

    def test_bad_integrator(self):
        bad = dict(BASE_CONFIG, integrator="rk4")
        with pytest.raises(ConfigError, match="integrator"):
            resolve_config(bad)

    def test_regression_degree_validated(self):
        bad = dict(BASE_CONFIG, extrapolation={"method": "regression", "degree": 3})
        with pytest.raises(ConfigError, match="degree"):
            resolve_config(bad)

    def test_fig_configs_parse(self):
        for name in ("fig1", "fig2", "fig3", "fig4"):
            cfg = resolve_config(_load_fig_config(name))
            assert cfg["grid"]["n_nodes"] == 9


class TestCurveCommand:
    def test_curve_and_meta_rerun_byte_identical(self, tmp_path):
        cfg_path = write_config(tmp_path)
        out1 = tmp_path / "run1"
        assert main(["curve", "--config", str(cfg_path), "--out", str(out1)]) == 0
        first = (out1 / "curve.csv").read_bytes()
        meta = out1 / "meta.json"
        out2 = tmp_path / "run2"
        assert main(["curve", "--config", str(meta), "--out", str(out2)]) == 0
        assert (out2 / "curve.csv").read_bytes() == first
        assert json.loads(meta.read_text())["config"]["shots"]["seed"] == 3

    def test_dry_run(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path)
        out = tmp_path / "dry"
        assert main(
            ["curve", "--config", str(cfg_path), "--out", str(out), "--dry-run"]
        ) == 0
        resolved = json.loads(capsys.readouterr().out)
        assert resolved["grid"]["n_nodes"] == 4
        assert not (out / "curve.csv").exists()

    def test_jobs_do_not_change_results(self, tmp_path):
        curve1 = run_curve(BASE_CONFIG, jobs=1)
        curve2 = run_curve(BASE_CONFIG, jobs=2)
        assert [r["noisy_mean"] for r in curve1["rows"]] == [
            r["noisy_mean"] for r in curve2["rows"]
        ]

    def test_seed_override(self, tmp_path):
        cfg_path = write_config(tmp_path)
        out = tmp_path / "seeded"
        assert main(
            ["curve", "--config", str(cfg_path), "--out", str(out), "--seed", "99"]
        ) == 0
        meta = json.loads((out / "meta.json").read_text())
        assert meta["config"]["shots"]["seed"] == 99

    def test_auto_interval(self):
        cfg = json.loads(json.dumps(BASE_CONFIG))
        cfg["grid"]["interval"] = "auto"
        curve = run_curve(cfg)
        assert curve["grid"].nodes[-1] < 0.3

    def test_missing_config_file(self, tmp_path):
        assert main(
            ["curve", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]
        ) == 2

    def test_json_format_adds_curve_json(self, tmp_path):
        cfg_path = write_config(tmp_path)
        out = tmp_path / "json"
        assert main(
            ["curve", "--config", str(cfg_path), "--out", str(out), "--format", "json"]
        ) == 0
        assert (out / "curve.json").exists()


class TestExtrapolateCommand:
    def _write_curve(self, tmp_path, rows):
        path = tmp_path / "curve.csv"
        lines = ["node_index,tau,step_count,noiseless,noisy_mean,n_shots,seed,reference"]
        for i, (tau, val) in enumerate(rows):
            lines.append(f"{i},{tau!r},{100 - i},{val!r},{val!r},10,1,0.5")
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_constant_curve(self, tmp_path, capsys):
        path = self._write_curve(tmp_path, [(0.01, 2.5), (0.02, 2.5), (0.03, 2.5)])
        out = tmp_path / "res"
        assert main(["extrapolate", "--curve", str(path), "--out", str(out)]) == 0
        result = json.loads((out / "result.json").read_text())
        assert result["value_at_zero"] == pytest.approx(2.5)
        assert result["extrapolation_error"] == pytest.approx(2.0)
        assert result["gamma_l1"] >= 1.0
        assert len(result["curve_samples"]) == 201

    def test_regression_degree_too_large_exits_2(self, tmp_path):
        path = self._write_curve(tmp_path, [(0.01, 1.0), (0.02, 1.1), (0.03, 1.2)])
        out = tmp_path / "res"
        code = main(
            ["extrapolate", "--curve", str(path), "--method", "regression",
             "--degree", "2", "--out", str(out)]
        )
        assert code == 2

    def test_malformed_csv_exits_2(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text("tau,noisy_mean\n0.01,abc\n")
        assert main(["extrapolate", "--curve", str(path), "--out", str(tmp_path)]) == 2

    def test_duplicate_nodes_exit_2(self, tmp_path):
        path = self._write_curve(tmp_path, [(0.01, 1.0), (0.01, 1.1), (0.03, 1.2)])
        assert main(["extrapolate", "--curve", str(path), "--out", str(tmp_path)]) == 2

    def test_missing_required_column(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text("node_index,value\n0,1.0\n")
        with pytest.raises(ConfigError, match="tau"):
            read_curve_csv(path)

    def test_sampling_export_schema_accepted(self, tmp_path):
        path = tmp_path / "curve.csv"
        path.write_text(
            "node_index,tau,step_count,n_shots,mean,seed\n"
            "0,0.01,100,10,1.0,1\n1,0.02,50,10,1.1,1\n2,0.04,25,10,1.3,1\n"
        )
        parsed = read_curve_csv(path)
        result = run_extrapolation(parsed, "richardson", None)
        assert "value_at_zero" in result
        assert result.get("reference") is None


class TestVerifyCommand:
    def test_nodes_scope_passes(self, tmp_path):
        out = tmp_path / "verify"
        assert main(["verify", "--scope", "nodes", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] is True

    def test_unsupported_regime_exits_2(self, tmp_path):
        code = main(
            ["verify", "--scope", "sequences", "--l", "0.5", "--out", str(tmp_path)]
        )
        assert code == 2

    def test_sequences_scope_single_l(self, tmp_path):
        out = tmp_path / "verify"
        assert main(
            ["verify", "--scope", "sequences", "--l", "2.0", "--out", str(out)]
        ) == 0


def test_console_script_runs():
    import subprocess

    proc = subprocess.run(
        ["lindblad-extrap", "--version"], capture_output=True, text=True
    )
    assert proc.returncode == 0
