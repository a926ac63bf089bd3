"""Kinematic and kinetic analysis of routines, and motor sizing.

Differentiates a uniformly sampled routine twice, turns the kinematics
into joint- and motor-side torque demand with a decoupled two-axis rigid
body model (point-mass hand on a lever plus a fixed device inertia per
axis, gravity acting on the dorsal-palmar axis only), and reduces the
profiles to the extremes that decide whether a given stepper is adequate.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonUniformGridError
from .model import DeviceParams, MotorSpec, gravity_torque
from .safety import SafetyEnvelope, scan_rom
from .trajectory import Routine


@dataclass(frozen=True)
class KinematicProfile:
    """Per-sample angular velocity and acceleration, joint side."""

    t_ms: np.ndarray  # int64, ms
    v_dp: np.ndarray  # deg/s
    v_cr: np.ndarray
    a_dp: np.ndarray  # deg/s^2
    a_cr: np.ndarray


@dataclass(frozen=True)
class TorqueProfile:
    """Per-sample drive torque demand, N*mm, joint and motor side."""

    t_ms: np.ndarray
    joint_dp: np.ndarray
    joint_cr: np.ndarray
    motor_dp: np.ndarray
    motor_cr: np.ndarray


@dataclass(frozen=True)
class AnalysisReport:
    """Extremes of one routine's demand plus the adequacy verdict.

    Speeds are reported on both sides of the gear because a stated maximum
    is meaningless without saying which shaft it was measured on.
    """

    max_joint_speed_dp: float
    max_joint_speed_cr: float
    max_motor_speed_dp: float
    max_motor_speed_cr: float
    max_motor_torque_dp: float
    max_motor_torque_cr: float
    rom_violations: int
    first_violation_t_ms: Optional[int]
    motor_adequate_dp: bool
    motor_adequate_cr: bool
    torque_margin_dp: float
    torque_margin_cr: float
    speed_margin_dp: float
    speed_margin_cr: float
    motor_name: str

    @property
    def motor_adequate(self) -> bool:
        return self.motor_adequate_dp and self.motor_adequate_cr


def _uniform_dt_s(t_ms: np.ndarray) -> float:
    if len(t_ms) < 3:
        raise ValueError("need at least 3 samples to differentiate")
    gaps = np.diff(t_ms)
    if not np.all(gaps == gaps[0]):
        raise NonUniformGridError(
            "samples are not uniformly spaced; resample the routine first"
        )
    return float(gaps[0]) / 1000.0


def _derivative(x: np.ndarray, h: float) -> np.ndarray:
    """First derivative: central interior, one-sided second order ends."""
    d = np.empty_like(x)
    d[1:-1] = (x[2:] - x[:-2]) / (2.0 * h)
    d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h)
    d[-1] = (3.0 * x[-1] - 4.0 * x[-2] + x[-3]) / (2.0 * h)
    return d


def _second_derivative(x: np.ndarray, h: float) -> np.ndarray:
    """Second derivative: central interior, one-sided second order ends.

    With only three samples the end stencils collapse to the single
    interior value (the quadratic through three points has constant
    curvature).
    """
    dd = np.empty_like(x)
    h2 = h * h
    dd[1:-1] = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / h2
    if len(x) >= 4:
        dd[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / h2
        dd[-1] = (2.0 * x[-1] - 5.0 * x[-2] + 4.0 * x[-3] - x[-4]) / h2
    else:
        dd[0] = dd[1]
        dd[-1] = dd[1]
    return dd


def differentiate(routine: Routine) -> KinematicProfile:
    """Angular velocity and acceleration of a uniformly resampled routine."""
    t_ms, dp, cr = routine.as_arrays()
    h = _uniform_dt_s(t_ms)
    return KinematicProfile(
        t_ms=t_ms,
        v_dp=_derivative(dp, h),
        v_cr=_derivative(cr, h),
        a_dp=_second_derivative(dp, h),
        a_cr=_second_derivative(cr, h),
    )


def axis_inertia(params: DeviceParams, axis: str) -> float:
    """Rotational inertia about one joint axis, kg*m^2: device structure
    plus the hand as a point mass at the lever radius."""
    device = params.device_inertia_dp if axis == "dp" else params.device_inertia_cr
    lever_m = params.lever_mm / 1000.0
    return device + params.hand_mass_kg * lever_m * lever_m


def inverse_dynamics(routine: Routine, params: DeviceParams) -> TorqueProfile:
    """Joint and motor torque demand along the routine.

    Per axis: tau = I * alpha, converted to N*mm, with the gravity load of
    the hand added on the dorsal-palmar axis. The cubital-radial axis spins
    about the gravity vector and carries inertia only. Motor torque is the
    joint torque divided by the gear ratio.
    """
    kin = differentiate(routine)
    _, dp, _ = routine.as_arrays()

    alpha_dp = np.radians(kin.a_dp)  # deg/s^2 -> rad/s^2
    alpha_cr = np.radians(kin.a_cr)
    grav = params.hand_mass_kg * params.gravity_mps2 * params.lever_mm * np.cos(
        np.radians(dp)
    )
    joint_dp = axis_inertia(params, "dp") * alpha_dp * 1000.0 + grav
    joint_cr = axis_inertia(params, "cr") * alpha_cr * 1000.0
    return TorqueProfile(
        t_ms=kin.t_ms,
        joint_dp=joint_dp,
        joint_cr=joint_cr,
        motor_dp=joint_dp / params.gear_ratio,
        motor_cr=joint_cr / params.gear_ratio,
    )


def margin(rating: float, demand: float) -> float:
    """rating/demand; infinite when there is no demand at all."""
    return math.inf if demand == 0 else rating / demand


def motor_adequacy(
    demand_torque_nmm: float, demand_speed_deg_s: float, motor: MotorSpec
) -> tuple[bool, float, float]:
    """Verdict for explicit motor-side demand figures.

    Returns (adequate, torque_margin, speed_margin); adequate means both
    demands sit at or below the rating.
    """
    ok = (
        demand_torque_nmm <= motor.rated_torque_nmm
        and demand_speed_deg_s <= motor.max_speed_deg_s
    )
    return (
        ok,
        margin(motor.rated_torque_nmm, demand_torque_nmm),
        margin(motor.max_speed_deg_s, demand_speed_deg_s),
    )


def analyze(
    routine: Routine,
    envelope: SafetyEnvelope,
    params: DeviceParams,
    motor: MotorSpec,
) -> AnalysisReport:
    """Reduce a routine to demand extremes and the per-axis motor verdict."""
    kin = differentiate(routine)
    tau = inverse_dynamics(routine, params)
    violations, first_t = scan_rom(routine, envelope)

    max_v_dp = float(np.max(np.abs(kin.v_dp)))
    max_v_cr = float(np.max(np.abs(kin.v_cr)))
    max_tau_dp = float(np.max(np.abs(tau.motor_dp)))
    max_tau_cr = float(np.max(np.abs(tau.motor_cr)))
    ok_dp, tm_dp, sm_dp = motor_adequacy(max_tau_dp, max_v_dp * params.gear_ratio, motor)
    ok_cr, tm_cr, sm_cr = motor_adequacy(max_tau_cr, max_v_cr * params.gear_ratio, motor)

    return AnalysisReport(
        max_joint_speed_dp=max_v_dp,
        max_joint_speed_cr=max_v_cr,
        max_motor_speed_dp=max_v_dp * params.gear_ratio,
        max_motor_speed_cr=max_v_cr * params.gear_ratio,
        max_motor_torque_dp=max_tau_dp,
        max_motor_torque_cr=max_tau_cr,
        rom_violations=violations,
        first_violation_t_ms=first_t,
        motor_adequate_dp=ok_dp,
        motor_adequate_cr=ok_cr,
        torque_margin_dp=tm_dp,
        torque_margin_cr=tm_cr,
        speed_margin_dp=sm_dp,
        speed_margin_cr=sm_cr,
        motor_name=motor.name,
    )


def report_to_dict(report: AnalysisReport) -> dict:
    """Machine-readable form of the report (single JSON object)."""

    def _num(x: float):
        return None if math.isinf(x) else x

    return {
        "motor": report.motor_name,
        "max_joint_speed_deg_s": {
            "dp": report.max_joint_speed_dp,
            "cr": report.max_joint_speed_cr,
        },
        "max_motor_speed_deg_s": {
            "dp": report.max_motor_speed_dp,
            "cr": report.max_motor_speed_cr,
        },
        "max_motor_torque_nmm": {
            "dp": report.max_motor_torque_dp,
            "cr": report.max_motor_torque_cr,
        },
        "rom_violations": report.rom_violations,
        "first_violation_t_ms": report.first_violation_t_ms,
        "motor_adequate": {
            "dp": report.motor_adequate_dp,
            "cr": report.motor_adequate_cr,
            "overall": report.motor_adequate,
        },
        "torque_margin": {
            "dp": _num(report.torque_margin_dp),
            "cr": _num(report.torque_margin_cr),
        },
        "speed_margin": {
            "dp": _num(report.speed_margin_dp),
            "cr": _num(report.speed_margin_cr),
        },
    }


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True)


def render_report_text(report: AnalysisReport) -> str:
    """Plain-text table for the terminal."""

    def fmt_margin(x: float) -> str:
        return "inf" if math.isinf(x) else f"{x:.2f}"

    rows = [
        ("quantity", "dorsal-palmar", "cubital-radial"),
        (
            "max joint speed [deg/s]",
            f"{report.max_joint_speed_dp:.2f}",
            f"{report.max_joint_speed_cr:.2f}",
        ),
        (
            "max motor speed [deg/s]",
            f"{report.max_motor_speed_dp:.2f}",
            f"{report.max_motor_speed_cr:.2f}",
        ),
        (
            "max motor torque [N*mm]",
            f"{report.max_motor_torque_dp:.2f}",
            f"{report.max_motor_torque_cr:.2f}",
        ),
        (
            "torque margin",
            fmt_margin(report.torque_margin_dp),
            fmt_margin(report.torque_margin_cr),
        ),
        (
            "speed margin",
            fmt_margin(report.speed_margin_dp),
            fmt_margin(report.speed_margin_cr),
        ),
        (
            f"adequate for {report.motor_name}",
            "yes" if report.motor_adequate_dp else "NO",
            "yes" if report.motor_adequate_cr else "NO",
        ),
    ]
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    out = io.StringIO()
    for i, row in enumerate(rows):
        out.write(
            f"{row[0]:<{widths[0]}}  {row[1]:>{widths[1]}}  {row[2]:>{widths[2]}}\n"
        )
        if i == 0:
            out.write("-" * (sum(widths) + 4) + "\n")
    if report.rom_violations:
        out.write(
            f"range-of-motion violations: {report.rom_violations} "
            f"(first at t={report.first_violation_t_ms} ms)\n"
        )
    else:
        out.write("range-of-motion violations: none\n")
    return out.getvalue()


def profiles_to_plot_csv(kin: KinematicProfile, tau: TorqueProfile) -> str:
    """Flat CSV of the velocity/acceleration/torque traces for external
    plotting tools."""
    out = io.StringIO()
    out.write("t_ms,v_dp,v_cr,a_dp,a_cr,tau_motor_dp,tau_motor_cr\n")
    for i in range(len(kin.t_ms)):
        out.write(
            f"{int(kin.t_ms[i])},{kin.v_dp[i]:.6f},{kin.v_cr[i]:.6f},"
            f"{kin.a_dp[i]:.6f},{kin.a_cr[i]:.6f},"
            f"{tau.motor_dp[i]:.6f},{tau.motor_cr[i]:.6f}\n"
        )
    return out.getvalue()
