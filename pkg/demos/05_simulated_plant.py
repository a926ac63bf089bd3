#!/usr/bin/env python3
# Step response of the rate-limited plant, and what sensor faults look like.
from wristlab import JointPose, SimConfig, SimulatedPlant

plant = SimulatedPlant(SimConfig(tick_hz=100, seed=0))

print("step command to (50, 15) deg; the axis slews at 36 deg/tick motor side:")
plant.command_target(JointPose(50.0, 15.0))
for k in range(8):
    plant.tick()
    r = plant.read_sensors()
    print(
        f"  tick {k + 1}: motor {plant.actual_motor_deg('dp'):7.2f} deg, "
        f"sensed joint dp {r.pose.theta_dp:6.2f} cr {r.pose.theta_cr:6.2f}"
    )
print("  at target:", plant.at_target())

print()
print("stuck pot on the dp axis:")
plant.inject_fault("dp", "stuck")
plant.command_target(JointPose(-20.0, 0.0))
for _ in range(20):
    plant.tick()
reading = plant.read_sensors()
print("  flagged:", (reading.fault_dp, reading.fault_cr))
print(f"  sensed dp stays {reading.pose.theta_dp:.2f} deg "
      f"while the axis really sits at "
      f"{plant.actual_motor_deg('dp') / 4:.2f} deg")

plant.clear_fault("dp")
plant.tick()
print("  after clearing:", f"{plant.read_sensors().pose.theta_dp:.2f} deg, live again")

print()
print("same seed, same commands, bit-identical sensing:")
runs = []
for _ in range(2):
    p = SimulatedPlant(SimConfig(adc_noise_sigma_counts=2.0, seed=42))
    p.command_target(JointPose(10.0, 5.0))
    trace = []
    for _ in range(5):
        p.tick()
        trace.append(p.read_sensors().pose.theta_dp)
    runs.append(trace)
print("  run A:", [f"{v:.3f}" for v in runs[0]])
print("  run B:", [f"{v:.3f}" for v in runs[1]])
print("  identical:", runs[0] == runs[1])
