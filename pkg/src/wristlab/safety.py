"""Safety envelope and the controller mode machine.

The envelope bounds what the station may ever be asked to do: joint range
of motion, joint-side speed, and motor-side torque. The mode machine owns
which operations are legal at any instant and latches the two abnormal
modes (EStop, Fault) until an explicit reset.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .errors import NotPlayableError
from .model import DeviceParams, JointPose, MotorSpec


@dataclass(frozen=True)
class SafetyEnvelope:
    """Hard limits the supervisor enforces.

    Default range of motion is +-50 degrees dorsal-palmar and +-15 degrees
    cubital-radial. The joint speed cap is the motor rating reflected
    through the 4:1 gear; the torque cap is the motor rating itself.
    """

    dp_min: float = -50.0
    dp_max: float = 50.0
    cr_min: float = -15.0
    cr_max: float = 15.0
    max_joint_speed_deg_s: float = 900.0
    max_motor_torque_nmm: float = 480.18

    def __post_init__(self):
        if not (self.dp_min < self.dp_max):
            raise ValueError("dp_min must be < dp_max")
        if not (self.cr_min < self.cr_max):
            raise ValueError("cr_min must be < cr_max")
        if not (self.max_joint_speed_deg_s > 0):
            raise ValueError("max_joint_speed_deg_s must be > 0")
        if not (self.max_motor_torque_nmm > 0):
            raise ValueError("max_motor_torque_nmm must be > 0")


@dataclass(frozen=True)
class RomViolation:
    """One axis outside its closed bounds."""

    axis: str  # "dp" or "cr"
    value: float
    bound: float


def check_pose(pose: JointPose, env: SafetyEnvelope) -> Optional[RomViolation]:
    """None if both axes are within their closed bounds, else the first
    violation found (dp checked before cr)."""
    if pose.theta_dp < env.dp_min:
        return RomViolation("dp", pose.theta_dp, env.dp_min)
    if pose.theta_dp > env.dp_max:
        return RomViolation("dp", pose.theta_dp, env.dp_max)
    if pose.theta_cr < env.cr_min:
        return RomViolation("cr", pose.theta_cr, env.cr_min)
    if pose.theta_cr > env.cr_max:
        return RomViolation("cr", pose.theta_cr, env.cr_max)
    return None


def clamp_pose(pose: JointPose, env: SafetyEnvelope) -> JointPose:
    """Per-axis clamp onto the envelope. Idempotent; the image is exactly
    the set check_pose accepts."""
    return JointPose(
        min(max(pose.theta_dp, env.dp_min), env.dp_max),
        min(max(pose.theta_cr, env.cr_min), env.cr_max),
    )


class Mode(enum.Enum):
    DISCONNECTED = "Disconnected"
    IDLE = "Idle"
    JOG = "Jog"
    RECORDING = "Recording"
    PLAYBACK = "Playback"
    ESTOP = "EStop"
    FAULT = "Fault"


class Event(enum.Enum):
    CONNECT = "connect"
    JOG = "jog"
    START_RECORD = "start_record"
    START_PLAYBACK = "start_playback"
    STOP = "stop"
    ESTOP = "estop"
    RESET = "reset"
    SENSOR_FAULT = "sensor_fault"


@dataclass(frozen=True)
class ControllerState:
    """Operator-visible mode plus entry bookkeeping."""

    mode: Mode = Mode.DISCONNECTED
    entered_t_ms: float = 0.0
    routine_name: Optional[str] = None  # set while in Playback


@dataclass(frozen=True)
class Rejected:
    """A transition the machine refused; the current state is unchanged."""

    reason: str


# Accepted (mode, event) -> next mode. Everything absent is rejected.
# STOP doubles as playback completion; jog is legal while recording so the
# operator can move the device as the trace is captured.
_TABLE: dict[tuple[Mode, Event], Mode] = {
    (Mode.DISCONNECTED, Event.CONNECT): Mode.IDLE,
    (Mode.IDLE, Event.JOG): Mode.JOG,
    (Mode.IDLE, Event.START_RECORD): Mode.RECORDING,
    (Mode.IDLE, Event.START_PLAYBACK): Mode.PLAYBACK,
    (Mode.JOG, Event.JOG): Mode.JOG,
    (Mode.JOG, Event.STOP): Mode.IDLE,
    (Mode.RECORDING, Event.JOG): Mode.RECORDING,
    (Mode.RECORDING, Event.STOP): Mode.IDLE,
    (Mode.PLAYBACK, Event.STOP): Mode.IDLE,
    (Mode.ESTOP, Event.RESET): Mode.IDLE,
    (Mode.FAULT, Event.RESET): Mode.IDLE,
}

# estop reaches EStop from every mode except Disconnected, in one hop.
for _m in Mode:
    if _m is not Mode.DISCONNECTED:
        _TABLE[(_m, Event.ESTOP)] = Mode.ESTOP

# A flagged sensor read faults any active mode; the latched modes stay put.
for _m in (Mode.IDLE, Mode.JOG, Mode.RECORDING, Mode.PLAYBACK):
    _TABLE[(_m, Event.SENSOR_FAULT)] = Mode.FAULT


def transition(
    state: ControllerState,
    event: Event,
    *,
    t_ms: float = 0.0,
    zero_velocity: bool = True,
    routine_name: Optional[str] = None,
) -> Union[ControllerState, Rejected]:
    """Apply one event to the mode machine.

    Total over all (state, event) pairs: returns the next state or a
    Rejected with the reason; a rejection never mutates anything.

    zero_velocity gates reset: a latched mode may only return to Idle once
    the plant reports no commanded motion, so a reset cannot resume
    mid-move.
    """
    key = (state.mode, event)
    if key not in _TABLE:
        return Rejected(f"{event.value} not allowed in {state.mode.value}")
    if event is Event.RESET and not zero_velocity:
        return Rejected("reset requires zero commanded velocity")
    next_mode = _TABLE[key]
    if next_mode is state.mode:
        # self-transition (jog updates, repeated estop): no re-entry
        return state
    return ControllerState(
        mode=next_mode,
        entered_t_ms=t_ms,
        routine_name=routine_name if next_mode is Mode.PLAYBACK else None,
    )


def scan_rom(routine, env: SafetyEnvelope) -> tuple[int, Optional[int]]:
    """Count samples outside the envelope; also the first offending t_ms."""
    count = 0
    first_t: Optional[int] = None
    for s in routine.samples:
        if check_pose(s.pose, env) is not None:
            count += 1
            if first_t is None:
                first_t = s.t_ms
    return count, first_t


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of vetting a routine against the envelope and motor."""

    ok: bool
    reasons: tuple[str, ...]
    report: Optional[object] = None  # AnalysisReport when analysis ran

    def summary(self) -> str:
        return "ok" if self.ok else "; ".join(self.reasons)


def validate_routine(
    routine,
    env: SafetyEnvelope,
    params: DeviceParams,
    motor: MotorSpec,
    dt_ms: int = 20,
) -> ValidationResult:
    """Vet a routine before it may be loaded for playback.

    ok iff it has zero range-of-motion violations and its kinematic and
    torque demand stays inside both the envelope caps and the motor
    rating. Raises NotPlayableError for routines with fewer than two
    samples.
    """
    # analysis depends on this module for the envelope type, so import late
    from .analysis import analyze
    from .trajectory import resample

    if len(routine.samples) < 2:
        raise NotPlayableError("routine needs at least 2 samples")

    duration = routine.samples[-1].t_ms - routine.samples[0].t_ms
    eff_dt = dt_ms
    if duration // eff_dt < 2:
        eff_dt = max(1, duration // 2)
    if duration // eff_dt < 2:
        return ValidationResult(False, ("routine too short to analyze",))

    report = analyze(resample(routine, eff_dt), env, params, motor)
    reasons = []
    if report.rom_violations > 0:
        reasons.append(
            f"{report.rom_violations} sample(s) outside range of motion, "
            f"first at t={report.first_violation_t_ms} ms"
        )
    max_joint_speed = max(report.max_joint_speed_dp, report.max_joint_speed_cr)
    if max_joint_speed > env.max_joint_speed_deg_s:
        reasons.append(
            f"joint speed demand {max_joint_speed:.1f} deg/s exceeds "
            f"envelope cap {env.max_joint_speed_deg_s:.1f}"
        )
    max_motor_torque = max(report.max_motor_torque_dp, report.max_motor_torque_cr)
    if max_motor_torque > env.max_motor_torque_nmm:
        reasons.append(
            f"motor torque demand {max_motor_torque:.1f} N*mm exceeds "
            f"envelope cap {env.max_motor_torque_nmm:.1f}"
        )
    if not (report.motor_adequate_dp and report.motor_adequate_cr):
        reasons.append(f"motor {motor.name} inadequate for this routine")
    return ValidationResult(not reasons, tuple(reasons), report)
