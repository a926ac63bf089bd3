"""Device model: unit conversions and the static torque model.

Conventions used throughout the package: angles in degrees, times in
milliseconds, torques in N*mm, masses in kg, lengths in mm. "Joint side"
refers to the two wrist axes (dorsal-palmar flexion and cubital-radial
deviation); "motor side" sits behind the gear reduction, so motor angles
are gear_ratio times larger and motor torques gear_ratio times smaller.

Everything in this module is a pure function over immutable values and is
safe to call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SensorRangeError

_I64_MIN = -(2**63)
_I64_MAX = 2**63 - 1


def round_half_away(x: float) -> int:
    """Round to the nearest integer with ties away from zero.

    Used everywhere a continuous value becomes a count (steps, ADC) so the
    quantization is symmetric around zero.
    """
    if not math.isfinite(x):
        raise ValueError(f"cannot round non-finite value {x!r}")
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class JointPose:
    """The two wrist angles, joint side, in degrees.

    theta_dp: dorsal-palmar flexion, positive = dorsal (back of hand up).
    theta_cr: cubital-radial deviation, positive = radial.

    Finite by construction; range enforcement is the safety module's job.
    """

    theta_dp: float
    theta_cr: float

    def __post_init__(self):
        object.__setattr__(self, "theta_dp", _require_finite("theta_dp", self.theta_dp))
        object.__setattr__(self, "theta_cr", _require_finite("theta_cr", self.theta_cr))

    def axis(self, name: str) -> float:
        if name == "dp":
            return self.theta_dp
        if name == "cr":
            return self.theta_cr
        raise KeyError(name)


@dataclass(frozen=True)
class DeviceParams:
    """Mechanical constants of the station.

    gear_ratio: motor turns per joint turn (four motor degrees per joint
        degree at the default 4:1 transmission).
    full_step_deg: motor-side degrees per full stepper step.
    microsteps: driver microstepping divisor.
    hand_mass_kg: mass of the supported hand.
    lever_mm: distance from the wrist rotation axis to the hand's center
        of mass.
    device_inertia_dp / device_inertia_cr: rotor+frame inertia about each
        joint axis, kg*m^2, excluding the hand point mass.
    """

    gear_ratio: float = 4.0
    full_step_deg: float = 1.8
    microsteps: int = 8
    hand_mass_kg: float = 0.5
    lever_mm: float = 71.1
    device_inertia_dp: float = 0.0005
    device_inertia_cr: float = 0.0005
    gravity_mps2: float = 9.81

    def __post_init__(self):
        if not (self.gear_ratio > 0):
            raise ValueError("gear_ratio must be > 0")
        if not (self.full_step_deg > 0):
            raise ValueError("full_step_deg must be > 0")
        if self.microsteps < 1 or int(self.microsteps) != self.microsteps:
            raise ValueError("microsteps must be an integer >= 1")
        if self.hand_mass_kg < 0:
            raise ValueError("hand_mass_kg must be >= 0")
        if self.lever_mm < 0:
            raise ValueError("lever_mm must be >= 0")

    @property
    def step_deg(self) -> float:
        """Motor-side degrees per microstep."""
        return self.full_step_deg / self.microsteps


@dataclass(frozen=True)
class AdcCalibration:
    """Mapping between pot ADC counts and the joint-side angle.

    The default is a 10-bit converter across a 270 degree pot, mounted so
    count 0 reads -135 degrees and full scale reads +135.
    """

    counts_max: int = 1023
    span_deg: float = 270.0
    offset_deg: float = -135.0

    def __post_init__(self):
        if self.counts_max < 1:
            raise ValueError("counts_max must be >= 1")
        if not (self.span_deg > 0):
            raise ValueError("span_deg must be > 0")

    @property
    def lsb_deg(self) -> float:
        """Smallest resolvable angle increment (~0.264 deg at defaults)."""
        return self.span_deg / self.counts_max


@dataclass(frozen=True)
class MotorSpec:
    """Stepper rating used for adequacy checks, motor side."""

    max_speed_deg_s: float = 3600.0
    rated_torque_nmm: float = 480.18
    name: str = "STM17"

    def __post_init__(self):
        if not (self.max_speed_deg_s > 0):
            raise ValueError("max_speed_deg_s must be > 0")
        if not (self.rated_torque_nmm > 0):
            raise ValueError("rated_torque_nmm must be > 0")


def joint_to_motor(theta: float, params: DeviceParams) -> float:
    """Joint-side angle to motor-side angle through the gear reduction."""
    return params.gear_ratio * _require_finite("theta", theta)


def motor_to_joint(theta_motor: float, params: DeviceParams) -> float:
    """Motor-side angle back to the joint side; inverse of joint_to_motor."""
    return _require_finite("theta_motor", theta_motor) / params.gear_ratio


def angle_to_steps(theta_motor: float, params: DeviceParams) -> int:
    """Quantize a motor-side angle to a signed microstep count.

    Raises ValueError if the count would not fit a signed 64-bit integer.
    """
    steps = round_half_away(_require_finite("theta_motor", theta_motor) / params.step_deg)
    if not (_I64_MIN <= steps <= _I64_MAX):
        raise ValueError(f"step count {steps} does not fit a signed 64-bit integer")
    return steps


def steps_to_angle(steps: int, params: DeviceParams) -> float:
    """Microstep count back to the motor-side angle."""
    return steps * params.step_deg


def adc_to_angle(counts: int, calib: AdcCalibration) -> float:
    """ADC counts to the joint-side angle.

    Counts outside [0, counts_max] indicate a wiring or converter problem
    and raise SensorRangeError; callers must surface this, not clamp it.
    """
    if counts < 0 or counts > calib.counts_max:
        raise SensorRangeError(
            f"count {counts} outside [0, {calib.counts_max}]"
        )
    return calib.offset_deg + calib.span_deg * counts / calib.counts_max


def angle_to_adc(theta: float, calib: AdcCalibration) -> int:
    """Joint-side angle to the nearest ADC count (simulator-side inverse)."""
    theta = _require_finite("theta", theta)
    lo = calib.offset_deg
    hi = calib.offset_deg + calib.span_deg
    if theta < lo or theta > hi:
        raise SensorRangeError(f"angle {theta} outside pot span [{lo}, {hi}]")
    return round_half_away((theta - lo) / calib.span_deg * calib.counts_max)


def gravity_torque(theta_dp: float, params: DeviceParams) -> float:
    """Joint-side gravity torque on the dorsal-palmar axis, N*mm.

    Point-mass hand at lever_mm from the axis; the lever's horizontal
    projection goes as cos(theta), so the demand peaks at theta = 0
    (hand level) at m*g*L and vanishes at +-90 degrees.

    The cubital-radial axis rotates about the gravity vector in the
    neutral posture and carries no gravity term.
    """
    theta_dp = _require_finite("theta_dp", theta_dp)
    # mass[kg] * g[m/s^2] * lever[mm] == torque in N*mm directly
    return params.hand_mass_kg * params.gravity_mps2 * params.lever_mm * math.cos(
        math.radians(theta_dp)
    )


def static_min_motor_torque(params: DeviceParams) -> float:
    """Minimum motor-side holding torque: peak gravity torque reflected
    through the gear reduction."""
    return gravity_torque(0.0, params) / params.gear_ratio
