#!/usr/bin/env python3
"""Kinematic/kinetic analysis of a routine and the motor verdict.

Writes velocity, acceleration, and motor torque traces to
analysis_traces.csv; renders a PNG next to it when matplotlib is
available.
"""
from wristlab import DeviceParams, MotorSpec, SafetyEnvelope
from wristlab.analysis import (
    analyze,
    differentiate,
    inverse_dynamics,
    profiles_to_plot_csv,
    render_report_text,
)
from wristlab.trajectory import generate_demo, resample, smooth

env = SafetyEnvelope()
params = DeviceParams()
motor = MotorSpec()

routine = resample(generate_demo(30_000, 0.5, env, name="demo"), 20)
routine = smooth(routine, 3)

kin = differentiate(routine)
tau = inverse_dynamics(routine, params)
report = analyze(routine, env, params, motor)

print(render_report_text(report))

with open("analysis_traces.csv", "w") as f:
    f.write(profiles_to_plot_csv(kin, tau))
print("wrote analysis_traces.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t_s = kin.t_ms / 1000.0
    fig, axes = plt.subplots(3, 1, figsize=(9, 9), sharex=True)
    _, dp, cr = routine.as_arrays()
    axes[0].plot(t_s, dp, label="dorsal-palmar")
    axes[0].plot(t_s, cr, label="cubital-radial")
    axes[0].set_ylabel("angle [deg]")
    axes[1].plot(t_s, kin.v_dp)
    axes[1].plot(t_s, kin.v_cr)
    axes[1].set_ylabel("velocity [deg/s]")
    axes[2].plot(t_s, tau.motor_dp)
    axes[2].plot(t_s, tau.motor_cr)
    axes[2].set_ylabel("motor torque [N*mm]")
    axes[2].set_xlabel("time [s]")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig("analysis_traces.png", dpi=100)
    print("wrote analysis_traces.png")
except ImportError:
    print("matplotlib not installed; skipped the PNG")
