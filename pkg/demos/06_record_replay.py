#!/usr/bin/env python3
"""The full session, in process and faster than real time: jog the device
along the growing-arc exercise while recording, save the trace, load it
back, replay it, and measure how faithfully the plant tracks it."""
import math
import tempfile

from wristlab import Controller, ControllerConfig, Mode, SafetyEnvelope
from wristlab.sim import SimConfig
from wristlab.trajectory import generate_demo, sample_at

tmp = tempfile.mkdtemp(prefix="wristlab_")
config = ControllerConfig(data_dir=tmp)
c = Controller(config, sim_config=SimConfig(tick_hz=config.tick_hz))

assert c.handle_command({"cmd": "connect"})["ok"]
demo = generate_demo(15_000, 0.5, SafetyEnvelope(), name="demo")

print("recording 15 s of guided motion at 50 Hz...")
assert c.handle_command({"cmd": "start_record", "name": "session"})["ok"]
t = 0.0
for _ in range(int(15_000 / c.dt_ms) + 1):
    pose = sample_at(demo, t)
    c.handle_command({"cmd": "jog", "dp": pose.theta_dp, "cr": pose.theta_cr})
    c.tick()
    t += c.dt_ms
reply = c.handle_command({"cmd": "stop_record"})
print(f"  captured {reply['samples']} samples")

print("saving, loading, replaying...")
assert c.handle_command({"cmd": "save_routine", "name": "session"})["ok"]
assert c.handle_command({"cmd": "load_routine", "name": "session"})["ok"]
assert c.handle_command({"cmd": "start_playback", "name": "session"})["ok"]

err_dp, err_cr = [], []
while c.mode is Mode.PLAYBACK:
    c.tick()
    snap = c.snapshot()
    err_dp.append(snap["sensed"].theta_dp - snap["target"].theta_dp)
    err_cr.append(snap["sensed"].theta_cr - snap["target"].theta_cr)

rms = lambda errs: math.sqrt(sum(e * e for e in errs) / len(errs))
print(f"  replayed {len(err_dp)} ticks")
print(f"  RMS tracking error: dp {rms(err_dp):.3f} deg, cr {rms(err_cr):.3f} deg")
print(f"routine library on disk: {c.library.list_names()} in {tmp}")
