import json
import pathlib
import subprocess
import sys

import pytest
from click.testing import CliRunner

from glidersim.cli import main

REPO = pathlib.Path(__file__).resolve().parent.parent
DEFAULT = str(REPO / "scenarios" / "default.yaml")
NO_TAIL = str(REPO / "tests" / "fixtures" / "scenarios" / "no_tail.yaml")
MALFORMED = str(REPO / "tests" / "fixtures" / "malformed"
                / "03_negative_area.yaml")


@pytest.fixture()
def runner():
    return CliRunner()


class TestTrim:
    def test_reports_equilibrium(self, runner):
        result = runner.invoke(main, ["trim", "--scenario", DEFAULT])
        assert result.exit_code == 0
        assert "airspeed_ms" in result.output
        assert "glide_ratio" in result.output

    def test_no_trim_exits_nonzero(self, runner):
        result = runner.invoke(main, ["trim", "--scenario", NO_TAIL])
        assert result.exit_code == 1
        assert "no trim" in result.output

    def test_malformed_scenario_names_key(self, runner):
        result = runner.invoke(main, ["trim", "--scenario", MALFORMED])
        assert result.exit_code == 1
        assert "area" in result.output


class TestFly:
    def test_deterministic_summary(self, runner):
        args = ["fly", "--scenario", DEFAULT, "--controller", "pid",
                "--seed", "4"]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == 0
        assert first.output == second.output
        assert "cause = impact" in first.output

    def test_record_row_count(self, runner, tmp_path):
        out = tmp_path / "traj.csv"
        result = runner.invoke(main, [
            "fly", "--scenario", DEFAULT, "--controller", "pid",
            "--seed", "4", "--record", "--out", str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        meta = [l for l in lines if l.startswith("# ")]
        steps = next(int(l.split(" = ")[1]) for l in result.output.splitlines()
                     if l.startswith("steps"))
        header = 1
        assert len(lines) - len(meta) - header == steps + 1

    def test_record_requires_out(self, runner):
        result = runner.invoke(main, ["fly", "--scenario", DEFAULT,
                                      "--record"])
        assert result.exit_code == 2

    def test_unknown_controller_usage_error(self, runner):
        result = runner.invoke(main, ["fly", "--scenario", DEFAULT,
                                      "--controller", "autopilot"])
        assert result.exit_code == 2


class TestReplay:
    def test_round_trip(self, runner, tmp_path):
        out = tmp_path / "traj.csv"
        rec = runner.invoke(main, [
            "fly", "--scenario", DEFAULT, "--controller", "pid",
            "--seed", "9", "--record", "--out", str(out)])
        assert rec.exit_code == 0
        rep = runner.invoke(main, ["replay", str(out)])
        assert rep.exit_code == 0
        assert "replay ok" in rep.output

    def test_detects_tampering(self, runner, tmp_path):
        out = tmp_path / "traj.csv"
        runner.invoke(main, [
            "fly", "--scenario", DEFAULT, "--controller", "pid",
            "--seed", "9", "--record", "--out", str(out)])
        text = out.read_text().splitlines()
        text[-1] = text[-1].replace(text[-1].split(",")[1], "999.0", 1)
        out.write_text("\n".join(text) + "\n")
        rep = runner.invoke(main, ["replay", str(out)])
        assert rep.exit_code == 1
        assert "mismatch" in rep.output

    def test_missing_metadata_rejected(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,x\n0.0,1.0\n")
        rep = runner.invoke(main, ["replay", str(bad)])
        assert rep.exit_code == 1
        assert "metadata" in rep.output


class TestCampaign:
    def test_stats_and_scatter(self, runner, tmp_path):
        out = tmp_path / "scatter.csv"
        stats_out = tmp_path / "stats.json"
        result = runner.invoke(main, [
            "campaign", "--scenario", DEFAULT, "--controller", "pid",
            "--n", "8", "--seed", "0", "--out", str(out),
            "--stats-out", str(stats_out)])
        assert result.exit_code == 0
        assert "mmd_m = " in result.output
        rows = out.read_text().splitlines()
        assert rows[0] == "seed,impact_x,impact_y,miss,cause"
        assert len(rows) == 9
        stats = json.loads(stats_out.read_text())
        assert stats["n"] == 8

    def test_worker_count_invariance(self, runner, tmp_path):
        csvs = []
        for workers in ("1", "4"):
            out = tmp_path / f"scatter_{workers}.csv"
            result = runner.invoke(main, [
                "campaign", "--scenario", DEFAULT, "--controller", "pid",
                "--n", "10", "--seed", "0", "--workers", workers,
                "--out", str(out)])
            assert result.exit_code == 0
            csvs.append(out.read_text())
        assert csvs[0] == csvs[1]

    def test_zero_n_usage_error(self, runner):
        result = runner.invoke(main, [
            "campaign", "--scenario", DEFAULT, "--n", "0"])
        assert result.exit_code == 2


class TestValidateConfig:
    def test_accepts_shipped(self, runner):
        for name in ("default.yaml", "east_wind.yaml", "turbulence.yaml"):
            result = runner.invoke(main, [
                "validate-config", "--scenario",
                str(REPO / "scenarios" / name)])
            assert result.exit_code == 0, result.output

    def test_rejects_malformed_with_key(self, runner):
        result = runner.invoke(main, ["validate-config", "--scenario",
                                      MALFORMED])
        assert result.exit_code == 1
        assert "glider.surfaces[0]" in result.output


class TestServe:
    def test_reset_step_close_protocol(self):
        proc = subprocess.Popen(
            [sys.executable, "-m", "glidersim", "serve", "--scenario",
             DEFAULT],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
        try:
            def ask(payload):
                proc.stdin.write(json.dumps(payload) + "\n")
                proc.stdin.flush()
                return json.loads(proc.stdout.readline())

            hello = ask({"op": "hello"})
            assert hello["ok"] and hello["obs_size"] == 6
            reset = ask({"op": "reset", "seed": 5})
            assert reset["ok"] and len(reset["obs"]) == 6
            step = ask({"op": "step", "action": [0.0, 0.0]})
            assert step["ok"]
            assert step["reward"] <= 0.0
            assert step["info"]["t"] == pytest.approx(0.01)
            bad = ask({"op": "step", "action": [0.0]})
            assert not bad["ok"]
            bye = ask({"op": "close"})
            assert bye["ok"]
            assert proc.wait(timeout=10) == 0
        finally:
            proc.kill()

    def test_external_controller_round_trip(self):
        # the fly --controller external mode asks for one action per step
        proc = subprocess.Popen(
            [sys.executable, "-m", "glidersim", "fly", "--scenario", DEFAULT,
             "--controller", "external", "--seed", "1"],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
        try:
            summary = []
            while True:
                line = proc.stdout.readline()
                if not line:
                    break
                if line.startswith("{"):
                    msg = json.loads(line)
                    assert msg["op"] == "act" and len(msg["obs"]) == 6
                    proc.stdin.write(json.dumps({"action": [0.0, 0.0]})
                                     + "\n")
                    proc.stdin.flush()
                else:
                    summary.append(line.strip())
            assert proc.wait(timeout=10) == 0
            assert any(s.startswith("cause = ") for s in summary)
        finally:
            proc.kill()
