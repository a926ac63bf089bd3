"""The live controller: safety, plant, recorder, playback, and telemetry.

One Controller instance owns all mutable session state and is advanced by
calling tick() at the configured rate. Commands arrive as plain dicts
(the same shape the wire protocol uses), are applied immediately between
ticks, and take effect on the plant at the next tick. Telemetry frames
and state-change events accumulate in an internal buffer the caller
drains.

Time is simulated: one tick advances the session clock by 1000/tick_hz
milliseconds regardless of wall time, which is what makes accelerated
runs and bit-identical replays possible.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import LibraryError, NotPlayableError, RoutineFormatError, WristlabError
from .model import AdcCalibration, DeviceParams, JointPose, MotorSpec
from .safety import (
    ControllerState,
    Event,
    Mode,
    Rejected,
    SafetyEnvelope,
    clamp_pose,
    transition,
    validate_routine,
)
from .sim import SimConfig, SimulatedPlant
from .trajectory import (
    Routine,
    RoutineSample,
    parse,
    quantize_deg,
    sample_at,
    serialize,
)

ROUTINE_NAME_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")

_ACTIVE_MODES = frozenset({Mode.IDLE, Mode.JOG, Mode.RECORDING, Mode.PLAYBACK})


@dataclass(frozen=True)
class ControllerConfig:
    """Loop rates and session defaults.

    The recording rate must divide the tick rate, and recording timestamps
    must land on integer milliseconds.
    """

    tick_hz: int = 100
    record_hz: int = 50
    telemetry_divisor: int = 5
    jog_speed_deg_s: float = 200.0
    data_dir: str = "routines"

    def __post_init__(self):
        if self.tick_hz < 1:
            raise ValueError("tick_hz must be >= 1")
        if self.record_hz < 1 or self.tick_hz % self.record_hz != 0:
            raise ValueError("record_hz must divide tick_hz")
        if 1000 % self.record_hz != 0:
            raise ValueError("record_hz must divide 1000 (integer-ms timestamps)")
        if self.telemetry_divisor < 1:
            raise ValueError("telemetry_divisor must be >= 1")
        if not (self.jog_speed_deg_s > 0):
            raise ValueError("jog_speed_deg_s must be > 0")


class RoutineLibrary:
    """Permanent routine store: one canonical CSV file per routine.

    Names are restricted to [A-Za-z0-9_-]{1,64}; anything else (slashes,
    dots, empty) is refused before it can touch the filesystem.
    """

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)

    def _path(self, name: str) -> Path:
        if not ROUTINE_NAME_RE.fullmatch(name):
            raise LibraryError(f"invalid routine name {name!r}")
        return self.data_dir / f"{name}.csv"

    def save(self, name: str, routine: Routine, overwrite: bool = False) -> Path:
        path = self._path(name)
        if path.exists() and not overwrite:
            raise LibraryError(f"routine {name!r} already exists (no overwrite)")
        self.data_dir.mkdir(parents=True, exist_ok=True)
        path.write_bytes(serialize(routine))
        return path

    def load(self, name: str) -> Routine:
        path = self._path(name)
        if not path.exists():
            raise LibraryError(f"no routine named {name!r}")
        return parse(path.read_bytes())

    def list_names(self) -> list[str]:
        if not self.data_dir.is_dir():
            return []
        return sorted(
            p.stem for p in self.data_dir.glob("*.csv") if ROUTINE_NAME_RE.fullmatch(p.stem)
        )


class Controller:
    """Single-writer control loop over the simulated plant."""

    def __init__(
        self,
        config: ControllerConfig = ControllerConfig(),
        envelope: SafetyEnvelope = SafetyEnvelope(),
        params: DeviceParams = DeviceParams(),
        calib: AdcCalibration = AdcCalibration(),
        motor: MotorSpec = MotorSpec(),
        sim_config: Optional[SimConfig] = None,
    ):
        self.config = config
        self.envelope = envelope
        self.params = params
        self.calib = calib
        self.motor = motor
        if sim_config is None:
            sim_config = SimConfig(tick_hz=config.tick_hz)
        if sim_config.tick_hz != config.tick_hz:
            raise ValueError("sim_config.tick_hz must match config.tick_hz")
        self.plant = SimulatedPlant(sim_config, params, calib)
        self.library = RoutineLibrary(config.data_dir)

        self.state = ControllerState(Mode.DISCONNECTED)
        self.dt_ms = 1000.0 / config.tick_hz
        self.tick_count = 0
        self._record_divisor = config.tick_hz // config.record_hz
        self._record_dt_ms = 1000 // config.record_hz

        self._slider = JointPose(0.0, 0.0)
        self._target = JointPose(0.0, 0.0)
        self._jog_speed = config.jog_speed_deg_s
        self._last_sensed = self.plant.read_sensors()

        self._record_name = ""
        self._record_samples: list[RoutineSample] = []
        self._record_t0: Optional[int] = None
        self.scratch: Optional[Routine] = None  # last finished recording
        self.loaded: dict[str, Routine] = {}

        self._playback_routine: Optional[Routine] = None
        self._playback_speed = 1.0
        self._playback_elapsed = 0.0
        self._playback_progress = 0.0

        self._timer_ms = 0.0
        self._events: list[dict] = []

    # -- observation -----------------------------------------------------

    @property
    def t_ms(self) -> float:
        return self.tick_count * self.dt_ms

    @property
    def mode(self) -> Mode:
        return self.state.mode

    def drain_events(self) -> list[dict]:
        out = self._events
        self._events = []
        return out

    def snapshot(self) -> dict:
        """Immutable view of the loop state for transports and tests."""
        return {
            "t_ms": self.t_ms,
            "mode": self.mode.value,
            "sensed": self._last_sensed.pose,
            "target": self._target,
            "commanded_steps": (
                self.plant.commanded_steps("dp"),
                self.plant.commanded_steps("cr"),
            ),
            "timer_ms": self._timer_ms,
            "progress": self._playback_progress,
        }

    # -- command handling --------------------------------------------------

    def handle_command(self, cmd: dict) -> dict:
        """Apply one command dict; returns {"ok": ...} with the client id
        echoed back when present."""
        reply = self._dispatch(cmd)
        if isinstance(cmd, dict) and "id" in cmd:
            reply["id"] = cmd["id"]
        return reply

    def _dispatch(self, cmd) -> dict:
        if not isinstance(cmd, dict) or not isinstance(cmd.get("cmd"), str):
            return {"ok": False, "reason": "command must be an object with a 'cmd' key"}
        handler = getattr(self, f"_cmd_{cmd['cmd']}", None)
        if handler is None:
            return {"ok": False, "reason": f"unknown command {cmd['cmd']!r}"}
        try:
            return handler(cmd)
        except WristlabError as exc:
            return {"ok": False, "reason": str(exc)}

    def _apply(self, event: Event, routine_name: Optional[str] = None):
        res = transition(
            self.state,
            event,
            t_ms=self.t_ms,
            zero_velocity=self.plant.at_target(),
            routine_name=routine_name,
        )
        if isinstance(res, Rejected):
            return res
        if res is not self.state:
            self._events.append(
                {"ev": "state", "from": self.state.mode.value, "to": res.mode.value}
            )
            self.state = res
        return res

    @staticmethod
    def _reject(reason: str) -> dict:
        return {"ok": False, "reason": reason}

    def _ok(self, **extra) -> dict:
        reply = {"ok": True, "state": self.mode.value}
        reply.update(extra)
        return reply

    def _cmd_connect(self, cmd: dict) -> dict:
        res = self._apply(Event.CONNECT)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        sensed = self.plant.read_sensors()
        self._target = clamp_pose(sensed.pose, self.envelope)
        self._slider = self._target
        return self._ok()

    def _cmd_disconnect(self, cmd: dict) -> dict:
        # session teardown is always legal; in-progress work is dropped
        if self.mode is not Mode.DISCONNECTED:
            self._events.append(
                {"ev": "state", "from": self.mode.value, "to": Mode.DISCONNECTED.value}
            )
            self.state = ControllerState(Mode.DISCONNECTED, entered_t_ms=self.t_ms)
        self._clear_playback()
        self._record_samples = []
        self._record_t0 = None
        return self._ok()

    def _cmd_jog(self, cmd: dict) -> dict:
        dp, cr = cmd.get("dp"), cmd.get("cr")
        if not self._is_finite_number(dp) or not self._is_finite_number(cr):
            return self._reject("jog needs finite numeric 'dp' and 'cr'")
        res = self._apply(Event.JOG)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        self._slider = clamp_pose(JointPose(float(dp), float(cr)), self.envelope)
        return self._ok(dp=self._slider.theta_dp, cr=self._slider.theta_cr)

    def _cmd_set_jog_speed(self, cmd: dict) -> dict:
        v = cmd.get("deg_s")
        if not self._is_finite_number(v) or v <= 0:
            return self._reject("set_jog_speed needs a positive 'deg_s'")
        if self.mode is Mode.DISCONNECTED:
            return self._reject("not connected")
        self._jog_speed = min(float(v), self.envelope.max_joint_speed_deg_s)
        return self._ok(deg_s=self._jog_speed)

    def _cmd_start_record(self, cmd: dict) -> dict:
        name = cmd.get("name")
        if not isinstance(name, str) or not ROUTINE_NAME_RE.fullmatch(name):
            return self._reject("invalid routine name")
        res = self._apply(Event.START_RECORD)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        self._record_name = name
        self._record_samples = []
        self._record_t0 = None
        self._timer_ms = 0.0
        return self._ok(name=name)

    def _cmd_stop_record(self, cmd: dict) -> dict:
        if self.mode is not Mode.RECORDING:
            return self._reject("not recording")
        return self._cmd_stop(cmd)

    def _cmd_stop(self, cmd: dict) -> dict:
        was = self.mode
        res = self._apply(Event.STOP)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        extra = {}
        if was is Mode.RECORDING:
            routine = self._finish_recording()
            extra = {"name": routine.name, "samples": len(routine.samples)}
        self._clear_playback()
        return self._ok(**extra)

    def _cmd_start_playback(self, cmd: dict) -> dict:
        name = cmd.get("name")
        speed = cmd.get("speed", 1.0)
        if not isinstance(name, str):
            return self._reject("start_playback needs a routine 'name'")
        if not self._is_finite_number(speed) or not (0.0 < speed <= 2.0):
            return self._reject("speed factor must be in (0, 2]")
        routine = self.loaded.get(name)
        if routine is None and self.scratch is not None and self.scratch.name == name:
            routine = self.scratch
        if routine is None:
            return self._reject(f"unknown routine {name!r}; load it first")
        try:
            result = validate_routine(routine, self.envelope, self.params, self.motor)
        except NotPlayableError as exc:
            return self._reject(str(exc))
        if not result.ok:
            return self._reject(f"routine failed validation: {result.summary()}")
        res = self._apply(Event.START_PLAYBACK, routine_name=name)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        self._playback_routine = routine
        self._playback_speed = float(speed)
        self._playback_elapsed = 0.0
        self._playback_progress = 0.0
        self._timer_ms = 0.0
        return self._ok(name=name, duration_ms=routine.duration_ms, speed=float(speed))

    def _cmd_estop(self, cmd: dict) -> dict:
        res = self._apply(Event.ESTOP)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        # whatever was captured before the stop is kept, not thrown away
        if self._record_samples:
            self._finish_recording()
        self._clear_playback()
        return self._ok()

    def _cmd_reset(self, cmd: dict) -> dict:
        res = self._apply(Event.RESET)
        if isinstance(res, Rejected):
            return self._reject(res.reason)
        return self._ok()

    def _cmd_save_routine(self, cmd: dict) -> dict:
        name = cmd.get("name")
        overwrite = bool(cmd.get("overwrite", False))
        if not isinstance(name, str):
            return self._reject("save_routine needs a 'name'")
        if self.scratch is None:
            return self._reject("nothing recorded yet")
        path = self.library.save(name, self.scratch, overwrite=overwrite)
        return self._ok(name=name, path=str(path))

    def _cmd_load_routine(self, cmd: dict) -> dict:
        name = cmd.get("name")
        if not isinstance(name, str):
            return self._reject("load_routine needs a 'name'")
        try:
            routine = self.library.load(name).normalized()
        except RoutineFormatError as exc:
            return self._reject(f"cannot parse routine {name!r}: {exc}")
        try:
            result = validate_routine(routine, self.envelope, self.params, self.motor)
        except NotPlayableError as exc:
            return self._reject(str(exc))
        if not result.ok:
            return self._reject(f"routine {name!r} failed validation: {result.summary()}")
        self.loaded[name] = routine
        return self._ok(
            name=name, samples=len(routine.samples), duration_ms=routine.duration_ms
        )

    def _cmd_list_routines(self, cmd: dict) -> dict:
        return self._ok(routines=self.library.list_names())

    def _cmd_inject_fault(self, cmd: dict) -> dict:
        axis, kind = cmd.get("axis"), cmd.get("kind")
        if axis not in ("dp", "cr") or kind not in ("stuck", "disconnect"):
            return self._reject("inject_fault needs axis dp|cr and kind stuck|disconnect")
        self.plant.inject_fault(axis, kind)
        return self._ok(axis=axis, kind=kind)

    def _cmd_clear_fault(self, cmd: dict) -> dict:
        axis = cmd.get("axis")
        if axis not in ("dp", "cr"):
            return self._reject("clear_fault needs axis dp|cr")
        self.plant.clear_fault(axis)
        return self._ok(axis=axis)

    @staticmethod
    def _is_finite_number(v) -> bool:
        return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)

    # -- recording ---------------------------------------------------------

    def _finish_recording(self) -> Routine:
        routine = Routine(
            self._record_name,
            tuple(self._record_samples),
            {"record_hz": str(self.config.record_hz)},
        )
        self.scratch = routine
        self._record_samples = []
        self._record_t0 = None
        return routine

    def _clear_playback(self):
        self._playback_routine = None
        self._playback_elapsed = 0.0

    # -- the loop ----------------------------------------------------------

    def tick(self):
        """Advance one control period.

        Order per tick: sense, fault check, target computation, plant
        command, plant integration, recorder, telemetry. In EStop/Fault no
        motion command is issued, so the commanded step position freezes at
        its pre-stop value within one tick.
        """
        self.tick_count += 1
        sensed = self.plant.read_sensors()
        self._last_sensed = sensed

        if sensed.any_fault and self.mode in _ACTIVE_MODES:
            self._apply(Event.SENSOR_FAULT)
            if self._record_samples:
                self._finish_recording()
            self._clear_playback()

        if self.mode in (Mode.RECORDING, Mode.PLAYBACK):
            self._timer_ms += self.dt_ms

        if self.mode in (Mode.JOG, Mode.RECORDING):
            self._target = self._step_toward_slider()
            self.plant.command_target(self._target)
        elif self.mode is Mode.PLAYBACK:
            routine = self._playback_routine
            pose = sample_at(routine, self._playback_elapsed)
            self._target = clamp_pose(pose, self.envelope)
            self.plant.command_target(self._target)
            self._playback_elapsed += self.dt_ms * self._playback_speed
            self._playback_progress = min(
                1.0, self._playback_elapsed / max(routine.duration_ms, 1)
            )

        self.plant.tick()

        if self.mode is Mode.RECORDING:
            if self._record_t0 is None:
                self._record_t0 = self.tick_count
            offset = self.tick_count - self._record_t0
            if offset % self._record_divisor == 0:
                t = (offset // self._record_divisor) * self._record_dt_ms
                # sensor quantization can read a hair past the envelope at
                # the range-of-motion boundary; recorded samples are future
                # playback targets, so clamp them back onto it
                pose = clamp_pose(
                    JointPose(
                        quantize_deg(sensed.pose.theta_dp),
                        quantize_deg(sensed.pose.theta_cr),
                    ),
                    self.envelope,
                )
                self._record_samples.append(RoutineSample(t, pose))

        if self.tick_count % self.config.telemetry_divisor == 0:
            self._events.append(self._telemetry_frame(sensed))

        if (
            self.mode is Mode.PLAYBACK
            and self._playback_elapsed > self._playback_routine.duration_ms
        ):
            self._playback_progress = 1.0
            self._apply(Event.STOP)
            self._clear_playback()

    def _step_toward_slider(self) -> JointPose:
        limit = self._jog_speed * self.dt_ms / 1000.0
        return JointPose(
            _approach(self._target.theta_dp, self._slider.theta_dp, limit),
            _approach(self._target.theta_cr, self._slider.theta_cr, limit),
        )

    def _telemetry_frame(self, sensed) -> dict:
        return {
            "ev": "telemetry",
            "t_ms": self.t_ms,
            "state": self.mode.value,
            "dp": sensed.pose.theta_dp,
            "cr": sensed.pose.theta_cr,
            "target_dp": self._target.theta_dp,
            "target_cr": self._target.theta_cr,
            "motor_dp": sensed.pose.theta_dp * self.params.gear_ratio,
            "motor_cr": sensed.pose.theta_cr * self.params.gear_ratio,
            "recording": self.mode is Mode.RECORDING,
            "progress": self._playback_progress if self.mode is Mode.PLAYBACK else 0.0,
            "timer_ms": self._timer_ms,
        }


def _approach(current: float, goal: float, limit: float) -> float:
    """Move current toward goal by at most limit."""
    delta = goal - current
    if delta > limit:
        return current + limit
    if delta < -limit:
        return current - limit
    return goal


def run_script(
    controller: Controller,
    commands: list[dict],
    duration_ms: float,
) -> list[dict]:
    """Drive a controller through a timed command script without a
    transport; the workhorse behind offline simulation and replay tests.

    Each command dict may carry "at_ms" (default 0); it is applied before
    the first tick that would cross that session time. Returns the full
    ordered event log: one {"at_ms", "cmd", "reply"} entry per command
    plus every telemetry/state event.
    """
    pending = sorted(
        (dict(c) for c in commands), key=lambda c: float(c.get("at_ms", 0))
    )
    log: list[dict] = []
    total_ticks = math.ceil(duration_ms / controller.dt_ms)
    for _ in range(total_ticks):
        while pending and float(pending[0].get("at_ms", 0)) <= controller.t_ms:
            cmd = pending.pop(0)
            at_ms = float(cmd.pop("at_ms", 0))
            reply = controller.handle_command(cmd)
            log.extend(controller.drain_events())
            log.append({"at_ms": at_ms, "cmd": cmd.get("cmd"), "reply": reply})
        controller.tick()
        log.extend(controller.drain_events())
    return log
