"""Command line entry points.

Subcommands:
    simulate     run the control service (live network mode or a scripted
                 offline run)
    generate     synthesize the growing-arc demo routine to a file
    analyze      kinematic/kinetic report for a routine file
    check-motor  adequacy verdict for explicit demand figures

Exit codes: 0 success, 1 validation or adequacy failure, 2 usage or file
parse errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

from . import analysis
from .controller import Controller, ControllerConfig, run_script
from .errors import WristlabError
from .model import AdcCalibration, DeviceParams, MotorSpec
from .safety import SafetyEnvelope, scan_rom
from .sim import SimConfig
from .trajectory import generate_demo, parse, resample, serialize, smooth

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wristlab",
        description="Two-axis wrist rehabilitation station: simulator, "
        "routine tools, and motor sizing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the control service")
    sim.add_argument("--host", default="127.0.0.1")
    sim.add_argument("--port", type=int, default=8765, help="TCP command port")
    sim.add_argument("--ws-port", type=int, default=8766, help="WebSocket port")
    sim.add_argument("--tick-hz", type=int, default=100)
    sim.add_argument("--record-hz", type=int, default=50)
    sim.add_argument("--noise-sigma", type=float, default=0.0,
                     help="ADC noise sigma in counts")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--data-dir", default=None,
                     help="routine directory (default $WRISTLAB_DATA_DIR or ./routines)")
    sim.add_argument("--accelerated", action="store_true",
                     help="run the loop as fast as possible instead of "
                     "pacing ticks to wall time")
    sim.add_argument("--script", default=None,
                     help="offline mode: NDJSON command script, one "
                     '{"at_ms": ..., "cmd": ...} per line')
    sim.add_argument("--duration-s", type=float, default=None,
                     help="offline mode: how much session time to simulate")
    sim.add_argument("--log", default=None,
                     help="offline mode: write the event log here instead of stdout")

    gen = sub.add_parser("generate", help="write the growing-arc demo routine")
    gen.add_argument("--out", required=True, help="output routine file")
    gen.add_argument("--duration-s", type=float, default=30.0)
    gen.add_argument("--freq-hz", type=float, default=0.5)
    gen.add_argument("--dt-ms", type=int, default=20)
    gen.add_argument("--name", default="demo")

    ana = sub.add_parser("analyze", help="kinematic/kinetic report for a routine")
    ana.add_argument("file", help="routine file")
    ana.add_argument("--dt-ms", type=int, default=20, help="analysis resample grid")
    ana.add_argument("--smooth-window", type=int, default=1,
                     help="odd moving-average window; 1 disables smoothing")
    ana.add_argument("--json", dest="json_out", default=None,
                     help="also write the report as JSON ('-' for stdout)")
    ana.add_argument("--plot-csv", default=None,
                     help="write velocity/acceleration/torque traces as CSV")

    chk = sub.add_parser("check-motor", help="adequacy for explicit demand figures")
    chk.add_argument("--torque-nmm", type=float, required=True,
                     help="motor-side torque demand")
    chk.add_argument("--speed-deg-s", type=float, required=True,
                     help="motor-side speed demand")
    chk.add_argument("--rated-torque-nmm", type=float, default=480.18)
    chk.add_argument("--max-speed-deg-s", type=float, default=3600.0)
    chk.add_argument("--motor-name", default="STM17")

    return parser


def _data_dir(flag_value) -> str:
    if flag_value:
        return flag_value
    return os.environ.get("WRISTLAB_DATA_DIR", "routines")


def _cmd_simulate(args) -> int:
    if args.tick_hz < 1:
        print("error: --tick-hz must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = ControllerConfig(
            tick_hz=args.tick_hz,
            record_hz=args.record_hz,
            data_dir=_data_dir(args.data_dir),
        )
        sim_config = SimConfig(
            tick_hz=args.tick_hz,
            adc_noise_sigma_counts=args.noise_sigma,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    controller = Controller(config, sim_config=sim_config)

    if args.script is not None:
        if args.duration_s is None:
            print("error: --script requires --duration-s", file=sys.stderr)
            return EXIT_USAGE
        try:
            commands = _read_script(args.script)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: bad script file: {exc}", file=sys.stderr)
            return EXIT_USAGE
        log = run_script(controller, commands, args.duration_s * 1000.0)
        text = "".join(json.dumps(entry) + "\n" for entry in log)
        if args.log:
            Path(args.log).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK

    return asyncio.run(_serve(controller, args))


async def _serve(controller, args) -> int:
    from .server import ControlService

    service = ControlService(controller, real_time=not args.accelerated)
    await service.start(host=args.host, tcp_port=args.port, ws_port=args.ws_port)
    print(f"listening tcp={args.host}:{service.tcp_port} "
          f"ws={args.host}:{service.ws_port}", flush=True)
    try:
        await service.run_forever()
    except (KeyboardInterrupt, asyncio.CancelledError):
        pass
    finally:
        await service.stop()
    return EXIT_OK


def _read_script(path: str) -> list[dict]:
    commands = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            commands.append(json.loads(line))
    return commands


def _cmd_generate(args) -> int:
    try:
        routine = generate_demo(
            duration_ms=int(args.duration_s * 1000),
            freq_hz=args.freq_hz,
            rom=SafetyEnvelope(),
            dt_ms=args.dt_ms,
            name=args.name,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    Path(args.out).write_bytes(serialize(routine))
    print(f"wrote {args.out}: {len(routine.samples)} samples, "
          f"{routine.duration_ms} ms")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    try:
        data = Path(args.file).read_bytes()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        routine = parse(data).normalized()
        uniform = resample(routine, args.dt_ms)
        if args.smooth_window != 1:
            uniform = smooth(uniform, args.smooth_window)
        envelope = SafetyEnvelope()
        params = DeviceParams()
        motor = MotorSpec()
        report = analysis.analyze(uniform, envelope, params, motor)
        kin = analysis.differentiate(uniform)
        tau = analysis.inverse_dynamics(uniform, params)
    except (WristlabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    print(analysis.render_report_text(report), end="")
    if args.json_out == "-":
        print(analysis.report_to_json(report))
    elif args.json_out:
        Path(args.json_out).write_text(
            analysis.report_to_json(report) + "\n", encoding="utf-8"
        )
    if args.plot_csv:
        Path(args.plot_csv).write_text(
            analysis.profiles_to_plot_csv(kin, tau), encoding="utf-8"
        )

    # ROM is judged on the routine as stored, not the resampled copy
    violations, _ = scan_rom(routine, envelope)
    ok = violations == 0 and report.rom_violations == 0 and report.motor_adequate
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_check_motor(args) -> int:
    motor = MotorSpec(
        max_speed_deg_s=args.max_speed_deg_s,
        rated_torque_nmm=args.rated_torque_nmm,
        name=args.motor_name,
    )
    ok, torque_margin, speed_margin = analysis.motor_adequacy(
        args.torque_nmm, args.speed_deg_s, motor
    )
    verdict = "adequate" if ok else "inadequate"
    print(f"motor {motor.name}: {verdict}")
    print(f"torque demand {args.torque_nmm:.2f} N*mm vs rating "
          f"{motor.rated_torque_nmm:.2f} N*mm -> margin {torque_margin:.2f}")
    print(f"speed demand {args.speed_deg_s:.2f} deg/s vs rating "
          f"{motor.max_speed_deg_s:.2f} deg/s -> margin {speed_margin:.2f}")
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "generate": _cmd_generate,
        "analyze": _cmd_analyze,
        "check-motor": _cmd_check_motor,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
