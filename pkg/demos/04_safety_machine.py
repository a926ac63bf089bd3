#!/usr/bin/env python3
# The mode machine: what is legal when, and how the latched modes behave.
from wristlab import ControllerState, Event, Mode, Rejected, transition


def show(state, event, **kw):
    result = transition(state, event, **kw)
    if isinstance(result, Rejected):
        print(f"  {state.mode.value:12} --{event.value:>14}--> rejected: {result.reason}")
        return state
    print(f"  {state.mode.value:12} --{event.value:>14}--> {result.mode.value}")
    return result


print("a normal session:")
s = ControllerState(Mode.DISCONNECTED)
s = show(s, Event.CONNECT)
s = show(s, Event.JOG)
s = show(s, Event.STOP)
s = show(s, Event.START_RECORD)
s = show(s, Event.STOP)
s = show(s, Event.START_PLAYBACK, routine_name="demo")

print("\nsomething goes wrong mid-playback:")
s = show(s, Event.ESTOP)
print("  (estop latches; only reset leaves it)")
s = show(s, Event.START_RECORD)
s = show(s, Event.RESET, zero_velocity=False)
s = show(s, Event.RESET, zero_velocity=True)

print("\na flagged sensor read faults any active mode:")
s = show(s, Event.SENSOR_FAULT)
s = show(s, Event.RESET)

print("\nestop reaches EStop from every connected mode in one hop:")
for mode in Mode:
    show(ControllerState(mode), Event.ESTOP)
