"""Independent straight-line recomputation of the analysis pipeline.

Deliberately implemented with plain Python loops and scalar math, no
numpy and no imports from the package's analysis module, so it can act as
an oracle for the vectorized implementation. Keep it dumb.
"""

import math


def derivative(values, h_s):
    """First derivative: central interior, 3-point one-sided ends."""
    n = len(values)
    out = [0.0] * n
    for i in range(1, n - 1):
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h_s)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h_s)
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (
        2.0 * h_s
    )
    return out


def second_derivative(values, h_s):
    """Second derivative: central interior, 4-point one-sided ends
    (3-sample inputs reuse the single interior value)."""
    n = len(values)
    out = [0.0] * n
    hh = h_s * h_s
    for i in range(1, n - 1):
        out[i] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / hh
    if n >= 4:
        out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / hh
        out[n - 1] = (
            2.0 * values[n - 1]
            - 5.0 * values[n - 2]
            + 4.0 * values[n - 3]
            - values[n - 4]
        ) / hh
    else:
        out[0] = out[1]
        out[n - 1] = out[1]
    return out


def joint_torques(angles_deg, accel_deg_s2, inertia_kgm2, gravity_gain_nmm):
    """Per-sample joint torque: I*alpha in N*mm plus gravity_gain*cos(theta).

    gravity_gain_nmm is m*g*L in N*mm for the gravity-loaded axis and 0.0
    for the axis that spins about the gravity vector.
    """
    out = []
    for theta, a in zip(angles_deg, accel_deg_s2):
        alpha_rad = a * math.pi / 180.0
        tau = inertia_kgm2 * alpha_rad * 1000.0
        tau += gravity_gain_nmm * math.cos(theta * math.pi / 180.0)
        out.append(tau)
    return out


def analyze_routine(times_ms, dp_deg, cr_deg, params, envelope, motor):
    """Full per-sample recomputation of the report extremes.

    Returns a dict with the same quantities AnalysisReport carries.
    """
    h_s = (times_ms[1] - times_ms[0]) / 1000.0
    lever_m = params.lever_mm / 1000.0
    inertia_dp = params.device_inertia_dp + params.hand_mass_kg * lever_m * lever_m
    inertia_cr = params.device_inertia_cr + params.hand_mass_kg * lever_m * lever_m
    gravity_gain = params.hand_mass_kg * params.gravity_mps2 * params.lever_mm

    v_dp = derivative(dp_deg, h_s)
    v_cr = derivative(cr_deg, h_s)
    a_dp = second_derivative(dp_deg, h_s)
    a_cr = second_derivative(cr_deg, h_s)
    tau_dp = joint_torques(dp_deg, a_dp, inertia_dp, gravity_gain)
    tau_cr = joint_torques(cr_deg, a_cr, inertia_cr, 0.0)

    max_v_dp = max(abs(v) for v in v_dp)
    max_v_cr = max(abs(v) for v in v_cr)
    max_tau_motor_dp = max(abs(t) / params.gear_ratio for t in tau_dp)
    max_tau_motor_cr = max(abs(t) / params.gear_ratio for t in tau_cr)

    violations = 0
    first_t = None
    for t, d, c in zip(times_ms, dp_deg, cr_deg):
        bad = (
            d < envelope.dp_min
            or d > envelope.dp_max
            or c < envelope.cr_min
            or c > envelope.cr_max
        )
        if bad:
            violations += 1
            if first_t is None:
                first_t = t

    return {
        "max_joint_speed_dp": max_v_dp,
        "max_joint_speed_cr": max_v_cr,
        "max_motor_speed_dp": max_v_dp * params.gear_ratio,
        "max_motor_speed_cr": max_v_cr * params.gear_ratio,
        "max_motor_torque_dp": max_tau_motor_dp,
        "max_motor_torque_cr": max_tau_motor_cr,
        "rom_violations": violations,
        "first_violation_t_ms": first_t,
        "motor_adequate_dp": max_tau_motor_dp <= motor.rated_torque_nmm
        and max_v_dp * params.gear_ratio <= motor.max_speed_deg_s,
        "motor_adequate_cr": max_tau_motor_cr <= motor.rated_torque_nmm
        and max_v_cr * params.gear_ratio <= motor.max_speed_deg_s,
    }
