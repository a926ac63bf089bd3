#!/usr/bin/env python3
# Units and the static torque model: what the gears, steppers, and pots
# do to an angle, and how much torque a level hand demands.
import numpy as np

from wristlab import (
    AdcCalibration,
    DeviceParams,
    adc_to_angle,
    angle_to_adc,
    angle_to_steps,
    gravity_torque,
    joint_to_motor,
    static_min_motor_torque,
)

params = DeviceParams()
calib = AdcCalibration()

print("gear ratio           :", params.gear_ratio)
print("microstep size       :", params.step_deg, "deg (motor side)")
print("ADC resolution       :", round(calib.lsb_deg, 4), "deg per count")
print()

for joint_deg in (0.0, 15.0, -50.0, 50.0):
    motor = joint_to_motor(joint_deg, params)
    steps = angle_to_steps(motor, params)
    counts = angle_to_adc(joint_deg, calib)
    print(
        f"joint {joint_deg:+6.1f} deg -> motor {motor:+7.1f} deg "
        f"-> {steps:+5d} steps | pot count {counts:4d} "
        f"reads back {adc_to_angle(counts, calib):+8.3f} deg"
    )

print()
print("gravity torque vs dorsal-palmar angle (hand mass "
      f"{params.hand_mass_kg} kg at {params.lever_mm} mm):")
for theta in np.arange(0, 91, 15):
    tau = gravity_torque(float(theta), params)
    bar = "#" * int(tau / 8)
    print(f"  {theta:3.0f} deg  {tau:7.1f} N*mm  {bar}")

print()
print(f"holding torque a motor must beat (through the gears): "
      f"{static_min_motor_torque(params):.2f} N*mm")
