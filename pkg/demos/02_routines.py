#!/usr/bin/env python3
# Build a routine by hand, look at interpolation/resampling/smoothing, and
# round-trip it through the file format.
from wristlab import (
    JointPose,
    Routine,
    RoutineSample,
    SafetyEnvelope,
    append_sample,
    generate_demo,
    parse,
    resample,
    sample_at,
    serialize,
    smooth,
)

# a tiny hand-made routine: three poses over 200 ms
routine = Routine("by_hand", (RoutineSample(0, JointPose(0.0, 0.0)),))
routine = append_sample(routine, RoutineSample(100, JointPose(10.0, -5.0)))
routine = append_sample(routine, RoutineSample(200, JointPose(0.0, 5.0)))

print("pose at t=50 ms  :", sample_at(routine, 50))
print("pose at t=150 ms :", sample_at(routine, 150))
print("past the end     :", sample_at(routine, 10_000), "(clamped)")
print()

fine = resample(routine, 25)
print(f"resampled to 25 ms grid: {len(fine.samples)} samples")
softened = smooth(fine, 3)
print("smoothed peak dp :", max(s.pose.theta_dp for s in softened.samples))
print()

# the growing-arc exercise: arcs widen from 10% to the full range of motion
demo = generate_demo(30_000, 0.5, SafetyEnvelope(), name="demo")
print(f"demo routine: {len(demo.samples)} samples over {demo.duration_ms} ms")
print("first sample :", demo.samples[0].pose)
print("widest dp arc:", max(abs(s.pose.theta_dp) for s in demo.samples), "deg")

data = serialize(demo)
print()
print("file round trip is exact:", parse(data) == demo)
print("---- first file lines ----")
print("\n".join(data.decode().splitlines()[:6]))
