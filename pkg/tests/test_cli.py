"""CLI contract: subcommands, exit codes, output hygiene."""

import json
import os

import pytest

from nanotouch.cli import main
from nanotouch.experiments import CURVE_CSV_HEADER


class TestSweepCommand:
    def test_short_sweep_writes_curve(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        code = main([
            "sweep", "--z-start", "5e-9", "--z-end", "4.5e-9", "--out", str(out),
        ])
        assert code == 0
        text = out.read_text()
        assert text.splitlines()[0] == CURVE_CSV_HEADER
        doc = json.loads(capsys.readouterr().out)
        assert doc["out"] == str(out)
        assert doc["events"] == []

    def test_plot_rendered(self, tmp_path):
        out = tmp_path / "curve.csv"
        png = tmp_path / "curve.png"
        code = main([
            "sweep", "--z-start", "5e-9", "--z-end", "4.5e-9",
            "--out", str(out), "--plot", str(png),
        ])
        assert code == 0
        assert png.stat().st_size > 1000

    def test_validate_passes_on_short_quiet_sweep(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        code = main([
            "sweep", "--z-start", "5e-9", "--z-end", "4.5e-9",
            "--out", str(out), "--validate",
        ])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pass"] is True

    def test_too_fast_speed_is_usage_error(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        code = main([
            "sweep", "--z-start", "5e-9", "--z-end", "4.5e-9",
            "--speed", "1.0", "--out", str(out),
        ])
        assert code == 2
        assert "0.01" in capsys.readouterr().err
        assert not out.exists()

    def test_malformed_config_leaves_no_partial_output(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "curve.csv"
        code = main([
            "sweep", "--config", str(bad), "--z-start", "5e-9", "--z-end", "4.5e-9",
            "--out", str(out),
        ])
        assert code == 2
        assert not out.exists()
        assert "JSON" in capsys.readouterr().err

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"scene": {"blned": 1.0}}))
        code = main([
            "sweep", "--config", str(bad), "--z-start", "5e-9", "--z-end", "4.5e-9",
            "--out", str(tmp_path / "c.csv"),
        ])
        assert code == 2
        assert "blned" in capsys.readouterr().err


class TestOracleCommand:
    def test_equilibria_json(self, tmp_path, capsys):
        code = main(["oracle", "--handle-pos", "2e-8"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["handle_pos_m"] == 2e-8
        assert len(doc["equilibria"]) == 3
        assert sum(e["stable"] for e in doc["equilibria"]) == 2

    def test_scan_output_and_plot(self, tmp_path):
        scan = tmp_path / "scan.csv"
        png = tmp_path / "scan.png"
        code = main([
            "oracle", "--handle-pos", "5e-9",
            "--scan-out", str(scan), "--plot", str(png),
        ])
        assert code == 0
        assert scan.read_text().splitlines()[0] == "tip_gap_m,balance_N"
        assert png.stat().st_size > 1000


class TestReplayCommand:
    def test_replays_trajectory(self, tmp_path, capsys):
        traj = tmp_path / "traj.csv"
        targets = ["handle_pos_m"] + [repr(5e-9 - i * 1e-12) for i in range(500)]
        traj.write_text("\n".join(targets) + "\n")
        out = tmp_path / "states.csv"
        code = main(["replay", "--trajectory", str(traj), "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("time_s,handle_pos_m,tip_pos_m")
        assert len(lines) == 501

    def test_empty_trajectory_rejected(self, tmp_path, capsys):
        traj = tmp_path / "traj.csv"
        traj.write_text("handle_pos_m\n")
        code = main(["replay", "--trajectory", str(traj), "--out", str(tmp_path / "o.csv")])
        assert code == 2


class TestUsage:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["sweep", "--frobnicate"])
        assert err.value.code == 2

    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_config_env_var_fallback(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "env.json"
        cfg.write_text(json.dumps({"scene": {"blend": 1.0}}))
        monkeypatch.setenv("NANOTOUCH_CONFIG", str(cfg))
        # the env config has the interactive stick: oracle still works
        code = main(["oracle", "--handle-pos", "2e-8"])
        assert code == 0
