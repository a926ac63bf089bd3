"""Exit codes and file outputs of the batch entry points."""

import json

import pytest

from wristlab.cli import main
from wristlab.model import JointPose
from wristlab.safety import SafetyEnvelope
from wristlab.trajectory import (
    Routine,
    RoutineSample,
    generate_demo,
    parse,
    serialize,
)


class TestGenerate:
    def test_writes_parseable_valid_routine(self, tmp_path, capsys):
        out = tmp_path / "demo.csv"
        assert main(["generate", "--out", str(out), "--duration-s", "30",
                     "--freq-hz", "0.5"]) == 0
        routine = parse(out.read_bytes())
        assert len(routine.samples) == 1501
        assert "1501 samples" in capsys.readouterr().out

    def test_byte_identical_across_runs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["generate", "--out", str(a)])
        main(["generate", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_zero_duration_is_usage_error(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        assert main(["generate", "--out", str(out), "--duration-s", "0"]) == 2
        assert "error" in capsys.readouterr().err


class TestAnalyze:
    def test_demo_is_adequate(self, tmp_path, capsys):
        out = tmp_path / "demo.csv"
        main(["generate", "--out", str(out)])
        code = main(["analyze", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "adequate for STM17" in text

    def test_rom_violation_exits_one(self, tmp_path):
        samples = tuple(
            RoutineSample(k * 20, JointPose(60.0 if k == 2 else 0.0, 0.0))
            for k in range(8)
        )
        bad = tmp_path / "bad.csv"
        bad.write_bytes(serialize(Routine("bad", samples)))
        assert main(["analyze", str(bad)]) == 1

    def test_static_pose_torque_near_static_minimum(self, tmp_path, capsys):
        samples = tuple(RoutineSample(k * 20, JointPose(0.0, 0.0)) for k in range(51))
        f = tmp_path / "static.csv"
        f.write_bytes(serialize(Routine("static", samples)))
        json_out = tmp_path / "report.json"
        assert main(["analyze", str(f), "--json", str(json_out)]) == 0
        report = json.loads(json_out.read_text())
        assert report["max_motor_torque_nmm"]["dp"] == pytest.approx(87.18, abs=0.05)

    def test_malformed_file_exits_two(self, tmp_path, capsys):
        f = tmp_path / "junk.csv"
        f.write_text("not a routine\n")
        assert main(["analyze", str(f)]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_two(self, tmp_path):
        assert main(["analyze", str(tmp_path / "ghost.csv")]) == 2

    def test_plot_csv_written(self, tmp_path):
        out = tmp_path / "demo.csv"
        main(["generate", "--out", str(out), "--duration-s", "5"])
        plot = tmp_path / "plot.csv"
        assert main(["analyze", str(out), "--plot-csv", str(plot)]) == 0
        header = plot.read_text().splitlines()[0]
        assert header == "t_ms,v_dp,v_cr,a_dp,a_cr,tau_motor_dp,tau_motor_cr"

    def test_smoothing_flag(self, tmp_path):
        out = tmp_path / "demo.csv"
        main(["generate", "--out", str(out), "--duration-s", "5"])
        assert main(["analyze", str(out), "--smooth-window", "5"]) == 0


class TestCheckMotor:
    def test_reference_demand_is_adequate(self, capsys):
        code = main(["check-motor", "--torque-nmm", "184.5",
                     "--speed-deg-s", "432.42"])
        assert code == 0
        text = capsys.readouterr().out
        assert "adequate" in text
        assert "margin 2.60" in text

    def test_over_torque_inadequate(self, capsys):
        code = main(["check-motor", "--torque-nmm", "500",
                     "--speed-deg-s", "100"])
        assert code == 1
        assert "inadequate" in capsys.readouterr().out

    def test_over_speed_inadequate(self):
        assert main(["check-motor", "--torque-nmm", "100",
                     "--speed-deg-s", "4000"]) == 1


class TestSimulateScripted:
    SCRIPT = [
        {"at_ms": 0, "cmd": "connect"},
        {"at_ms": 100, "cmd": "jog", "dp": 15.0, "cr": 3.0},
        {"at_ms": 900, "cmd": "estop"},
    ]

    def write_script(self, tmp_path):
        path = tmp_path / "script.ndjson"
        path.write_text("".join(json.dumps(c) + "\n" for c in self.SCRIPT))
        return path

    def test_scripted_run_logs_events(self, tmp_path):
        script = self.write_script(tmp_path)
        log = tmp_path / "log.ndjson"
        code = main(["simulate", "--script", str(script), "--duration-s", "1",
                     "--log", str(log), "--data-dir", str(tmp_path / "r")])
        assert code == 0
        entries = [json.loads(l) for l in log.read_text().splitlines()]
        replies = [e for e in entries if "reply" in e]
        assert all(e["reply"]["ok"] for e in replies)
        states = [e for e in entries if e.get("ev") == "state"]
        assert states[-1]["to"] == "EStop"
        frames = [e for e in entries if e.get("ev") == "telemetry"]
        assert len(frames) == 20  # 1 s at 100 Hz / divisor 5

    def test_same_seed_identical_logs(self, tmp_path):
        script = self.write_script(tmp_path)
        logs = []
        for tag in ("a", "b"):
            log = tmp_path / f"{tag}.ndjson"
            main(["simulate", "--script", str(script), "--duration-s", "2",
                  "--seed", "7", "--noise-sigma", "1.0",
                  "--log", str(log), "--data-dir", str(tmp_path / tag)])
            logs.append(log.read_bytes())
        assert logs[0] == logs[1]

    def test_script_without_duration_is_usage_error(self, tmp_path, capsys):
        script = self.write_script(tmp_path)
        assert main(["simulate", "--script", str(script)]) == 2

    def test_invalid_tick_hz_usage_error(self, tmp_path, capsys):
        script = self.write_script(tmp_path)
        assert main(["simulate", "--script", str(script), "--duration-s", "1",
                     "--tick-hz", "0"]) == 2

    def test_usage_error_exit_code_from_argparse(self):
        with pytest.raises(SystemExit) as exc:
            main(["analyze"])  # missing required file argument
        assert exc.value.code == 2
