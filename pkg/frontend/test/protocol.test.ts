import { describe, expect, it } from "vitest";

import {
  affordances,
  applyMessage,
  clampPose,
  formatTimer,
  newSession,
  ROM,
  TelemetryFrame,
  TRACE_WINDOW_MS,
} from "../src/protocol.js";

function frame(overrides: Partial<TelemetryFrame> = {}): TelemetryFrame {
  return {
    ev: "telemetry",
    t_ms: 0,
    state: "Idle",
    dp: 0,
    cr: 0,
    target_dp: 0,
    target_cr: 0,
    recording: false,
    progress: 0,
    timer_ms: 0,
    ...overrides,
  };
}

describe("session state derives only from messages", () => {
  it("starts disconnected with no fabricated telemetry", () => {
    const s = newSession();
    expect(s.mode).toBe("Disconnected");
    expect(s.latest).toBeNull();
    expect(s.traceDp).toHaveLength(0);
  });

  it("telemetry updates mode, latest frame, and traces", () => {
    const s = newSession();
    applyMessage(s, frame({ t_ms: 100, state: "Jog", dp: 12.5, target_dp: 13.0 }));
    expect(s.mode).toBe("Jog");
    expect(s.latest?.dp).toBe(12.5);
    expect(s.traceDp).toEqual([{ t: 100, sensed: 12.5, target: 13.0 }]);
  });

  it("state events change the mode immediately", () => {
    const s = newSession();
    applyMessage(s, { ev: "state", from: "Playback", to: "EStop" });
    expect(s.mode).toBe("EStop");
    expect(s.log.some((l) => l.includes("Playback -> EStop"))).toBe(true);
  });

  it("trace buffer keeps only the last 60 seconds", () => {
    const s = newSession();
    for (let t = 0; t <= TRACE_WINDOW_MS + 5000; t += 1000) {
      applyMessage(s, frame({ t_ms: t, dp: t / 1000 }));
    }
    const first = s.traceDp[0];
    const last = s.traceDp[s.traceDp.length - 1];
    expect(last.t - first.t).toBeLessThanOrEqual(TRACE_WINDOW_MS);
    expect(first.t).toBeGreaterThan(0);
  });

  it("correlates list_routines replies through pending ids", () => {
    const s = newSession();
    s.pending.set(7, "list_routines");
    applyMessage(s, { ok: true, id: 7, routines: ["a", "b"] });
    expect(s.routines).toEqual(["a", "b"]);
    expect(s.pending.has(7)).toBe(false);
  });

  it("drops the selection when the routine disappears from the list", () => {
    const s = newSession();
    s.selectedRoutine = "gone";
    s.pending.set(1, "list_routines");
    applyMessage(s, { ok: true, id: 1, routines: ["kept"] });
    expect(s.selectedRoutine).toBeNull();
  });

  it("logs rejections with their reason", () => {
    const s = newSession();
    s.pending.set(3, "start_playback");
    applyMessage(s, { ok: false, id: 3, reason: "routine failed validation" });
    expect(s.log[s.log.length - 1]).toContain("routine failed validation");
  });
});

describe("slider bounds", () => {
  it("clamps poses onto the range of motion", () => {
    expect(clampPose(999, -999)).toEqual({ dp: ROM.dpMax, cr: ROM.crMin });
    expect(clampPose(-70, 20)).toEqual({ dp: ROM.dpMin, cr: ROM.crMax });
    expect(clampPose(10, -5)).toEqual({ dp: 10, cr: -5 });
  });
});

describe("affordances follow the reported mode", () => {
  function connected(mode: string) {
    const s = newSession();
    s.connection = "connected";
    s.mode = mode;
    return affordances(s);
  }

  it("idle allows jog, record, playback", () => {
    const can = connected("Idle");
    expect(can.jog).toBe(true);
    expect(can.startRecord).toBe(true);
    expect(can.startPlayback).toBe(true);
    expect(can.reset).toBe(false);
  });

  it("estop is available in every connected mode", () => {
    for (const mode of ["Idle", "Jog", "Recording", "Playback", "EStop", "Fault"]) {
      expect(connected(mode).estop).toBe(true);
    }
  });

  it("reset only from the latched modes", () => {
    expect(connected("EStop").reset).toBe(true);
    expect(connected("Fault").reset).toBe(true);
    expect(connected("Idle").reset).toBe(false);
  });

  it("recording still allows jog (guided capture)", () => {
    const can = connected("Recording");
    expect(can.jog).toBe(true);
    expect(can.stopRecord).toBe(true);
  });

  it("nothing is allowed while disconnected", () => {
    const s = newSession();
    const can = affordances(s);
    expect(Object.values(can).every((v) => v === false)).toBe(true);
  });
});

describe("timer formatting", () => {
  it("renders minutes, seconds, tenths", () => {
    expect(formatTimer(0)).toBe("00:00.0");
    expect(formatTimer(12_340)).toBe("00:12.3");
    expect(formatTimer(61_500)).toBe("01:01.5");
  });
});
