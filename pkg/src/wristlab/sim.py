"""Deterministic simulated plant standing in for the real drive hardware.

Two rate-limited stepper axes tracking a commanded microstep position,
sensed through simulated pots with ADC quantization, optional seeded
Gaussian noise, and injectable sensor faults. Given the same config, seed,
and command sequence the state trajectory is bit-identical on every run.

The control loop owns the plant and is its only writer; everything else
sees it through commands and read snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Protocol, runtime_checkable

import numpy as np

from .model import (
    AdcCalibration,
    DeviceParams,
    JointPose,
    angle_to_steps,
    adc_to_angle,
    joint_to_motor,
    motor_to_joint,
    round_half_away,
    steps_to_angle,
)

Axis = Literal["dp", "cr"]
FaultKind = Literal["stuck", "disconnect"]

AXES: tuple[Axis, Axis] = ("dp", "cr")


@dataclass(frozen=True)
class SimConfig:
    """Plant integration settings.

    max_step_rate is motor-side microsteps per second; the default matches
    a 3600 deg/s motor at 0.225 deg per microstep.
    """

    tick_hz: int = 100
    max_step_rate: float = 16000.0
    adc_noise_sigma_counts: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.tick_hz < 1:
            raise ValueError("tick_hz must be >= 1")
        if not (self.max_step_rate > 0):
            raise ValueError("max_step_rate must be > 0")
        if self.adc_noise_sigma_counts < 0:
            raise ValueError("adc_noise_sigma_counts must be >= 0")


@dataclass(frozen=True)
class SensorReading:
    """One tick-synchronized pot read; flagged axes carry stale counts."""

    pose: JointPose
    fault_dp: bool = False
    fault_cr: bool = False

    @property
    def any_fault(self) -> bool:
        return self.fault_dp or self.fault_cr


@runtime_checkable
class HardwarePort(Protocol):
    """The three verbs a drive board must speak: command a target pose,
    read the latest tick-synchronized sensor sample, report fault flags.

    A serial-attached controller would implement the same surface and
    advance itself; the simulated plant is additionally stepped by the
    control loop through its tick() method, which is not part of this
    seam. Only the simulated implementation exists here.
    """

    def command_target(self, pose: JointPose) -> None: ...

    def read_sensors(self) -> SensorReading: ...

    def fault_status(self) -> tuple[bool, bool]: ...


@dataclass
class _AxisState:
    commanded_steps: int = 0
    actual_motor_deg: float = 0.0
    counts: int = 0
    fault: Optional[FaultKind] = None


class SimulatedPlant:
    """Rate-limited stepper tracking with pot/ADC sensing."""

    def __init__(
        self,
        config: SimConfig = SimConfig(),
        params: DeviceParams = DeviceParams(),
        calib: AdcCalibration = AdcCalibration(),
    ):
        self.config = config
        self.params = params
        self.calib = calib
        self._rng = np.random.default_rng(config.seed)
        self._axes = {axis: _AxisState() for axis in AXES}
        # max motor-side degrees the axis may move in one tick
        self._max_deg_per_tick = (
            config.max_step_rate * params.step_deg / config.tick_hz
        )
        for axis in AXES:
            self._sense(axis)

    # -- commands -------------------------------------------------------

    def command_target(self, pose: JointPose) -> None:
        for axis in AXES:
            self._axes[axis].commanded_steps = angle_to_steps(
                joint_to_motor(pose.axis(axis), self.params), self.params
            )

    def inject_fault(self, axis: Axis, kind: FaultKind) -> None:
        st = self._axes[axis]
        st.fault = kind
        if kind == "disconnect":
            st.counts = 0  # pot floats to the rail

    def clear_fault(self, axis: Axis) -> None:
        self._axes[axis].fault = None
        self._sense(axis)

    # -- integration ----------------------------------------------------

    def tick(self) -> None:
        """Advance one control period: move, then sense."""
        for axis in AXES:
            st = self._axes[axis]
            target = steps_to_angle(st.commanded_steps, self.params)
            delta = target - st.actual_motor_deg
            if delta > self._max_deg_per_tick:
                delta = self._max_deg_per_tick
            elif delta < -self._max_deg_per_tick:
                delta = -self._max_deg_per_tick
            st.actual_motor_deg += delta
            self._sense(axis)

    def _sense(self, axis: Axis) -> None:
        st = self._axes[axis]
        if st.fault is not None:
            return  # stuck or railed count stays as it is
        joint_deg = motor_to_joint(st.actual_motor_deg, self.params)
        raw = (
            (joint_deg - self.calib.offset_deg)
            / self.calib.span_deg
            * self.calib.counts_max
        )
        if self.config.adc_noise_sigma_counts > 0:
            raw += self._rng.normal(0.0, self.config.adc_noise_sigma_counts)
        st.counts = min(max(round_half_away(raw), 0), self.calib.counts_max)

    # -- observation ----------------------------------------------------

    def read_sensors(self) -> SensorReading:
        dp, cr = self._axes["dp"], self._axes["cr"]
        return SensorReading(
            pose=JointPose(
                adc_to_angle(dp.counts, self.calib),
                adc_to_angle(cr.counts, self.calib),
            ),
            fault_dp=dp.fault is not None,
            fault_cr=cr.fault is not None,
        )

    def fault_status(self) -> tuple[bool, bool]:
        return (
            self._axes["dp"].fault is not None,
            self._axes["cr"].fault is not None,
        )

    def commanded_steps(self, axis: Axis) -> int:
        return self._axes[axis].commanded_steps

    def actual_motor_deg(self, axis: Axis) -> float:
        return self._axes[axis].actual_motor_deg

    def at_target(self) -> bool:
        """True when both axes sit exactly on their commanded step angle."""
        return all(
            self._axes[a].actual_motor_deg
            == steps_to_angle(self._axes[a].commanded_steps, self.params)
            for a in AXES
        )
