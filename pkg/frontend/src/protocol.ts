// Protocol types and the console session state. Everything rendered by the
// panel derives from messages received here; the console never simulates
// device state on its own.

export interface TelemetryFrame {
  ev: "telemetry";
  t_ms: number;
  state: string;
  dp: number;
  cr: number;
  target_dp: number;
  target_cr: number;
  motor_dp?: number;
  motor_cr?: number;
  recording: boolean;
  progress: number;
  timer_ms: number;
}

export interface StateEvent {
  ev: "state";
  from: string;
  to: string;
}

export interface Reply {
  ok: boolean;
  reason?: string;
  id?: number | string;
  state?: string;
  routines?: string[];
  name?: string;
  samples?: number;
  duration_ms?: number;
  [key: string]: unknown;
}

export type ServerMessage = TelemetryFrame | StateEvent | Reply;

// slider hard bounds; mirrors the device's range-of-motion envelope
export const ROM = {
  dpMin: -50,
  dpMax: 50,
  crMin: -15,
  crMax: 15,
};

export const TRACE_WINDOW_MS = 60_000;

export interface TracePoint {
  t: number;
  sensed: number;
  target: number;
}

export interface ConsoleSession {
  connection: "disconnected" | "connecting" | "connected" | "error";
  lastError: string | null;
  mode: string; // last mode reported by the server
  latest: TelemetryFrame | null;
  traceDp: TracePoint[];
  traceCr: TracePoint[];
  routines: string[];
  selectedRoutine: string | null;
  // command id -> command name, for correlating replies
  pending: Map<number | string, string>;
  log: string[];
}

export function newSession(): ConsoleSession {
  return {
    connection: "disconnected",
    lastError: null,
    mode: "Disconnected",
    latest: null,
    traceDp: [],
    traceCr: [],
    routines: [],
    selectedRoutine: null,
    pending: new Map(),
    log: [],
  };
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(Math.max(value, lo), hi);
}

export function clampPose(dp: number, cr: number): { dp: number; cr: number } {
  return {
    dp: clamp(dp, ROM.dpMin, ROM.dpMax),
    cr: clamp(cr, ROM.crMin, ROM.crMax),
  };
}

function pushTrace(buffer: TracePoint[], point: TracePoint): void {
  buffer.push(point);
  const cutoff = point.t - TRACE_WINDOW_MS;
  // buffer is time ordered, so trim from the front
  let drop = 0;
  while (drop < buffer.length && buffer[drop].t < cutoff) drop++;
  if (drop > 0) buffer.splice(0, drop);
}

function appendLog(session: ConsoleSession, line: string): void {
  session.log.push(line);
  if (session.log.length > 50) session.log.splice(0, session.log.length - 50);
}

export function isTelemetry(msg: ServerMessage): msg is TelemetryFrame {
  return (msg as TelemetryFrame).ev === "telemetry";
}

export function isStateEvent(msg: ServerMessage): msg is StateEvent {
  return (msg as StateEvent).ev === "state";
}

/** Fold one server message into the session. Mutates and returns it. */
export function applyMessage(
  session: ConsoleSession,
  msg: ServerMessage,
): ConsoleSession {
  if (isTelemetry(msg)) {
    session.latest = msg;
    session.mode = msg.state;
    pushTrace(session.traceDp, { t: msg.t_ms, sensed: msg.dp, target: msg.target_dp });
    pushTrace(session.traceCr, { t: msg.t_ms, sensed: msg.cr, target: msg.target_cr });
    return session;
  }
  if (isStateEvent(msg)) {
    session.mode = msg.to;
    appendLog(session, `state: ${msg.from} -> ${msg.to}`);
    return session;
  }
  const reply = msg as Reply;
  const cmd = reply.id !== undefined ? session.pending.get(reply.id) : undefined;
  if (reply.id !== undefined) session.pending.delete(reply.id);
  if (!reply.ok) {
    appendLog(session, `rejected ${cmd ?? "command"}: ${reply.reason}`);
    return session;
  }
  if (cmd === "list_routines" && Array.isArray(reply.routines)) {
    session.routines = reply.routines;
    if (
      session.selectedRoutine !== null &&
      !session.routines.includes(session.selectedRoutine)
    ) {
      session.selectedRoutine = null;
    }
  } else if (cmd && cmd !== "jog") {
    appendLog(session, `ok: ${cmd}`);
  }
  return session;
}

// What the panel may do in each mode. Derived from protocol state only.
export interface Affordances {
  jog: boolean;
  startRecord: boolean;
  stopRecord: boolean;
  startPlayback: boolean;
  stop: boolean;
  estop: boolean;
  reset: boolean;
}

export function affordances(session: ConsoleSession): Affordances {
  const connected = session.connection === "connected";
  const mode = session.mode;
  return {
    jog: connected && (mode === "Idle" || mode === "Jog" || mode === "Recording"),
    startRecord: connected && mode === "Idle",
    stopRecord: connected && mode === "Recording",
    startPlayback: connected && mode === "Idle",
    stop: connected && (mode === "Jog" || mode === "Recording" || mode === "Playback"),
    estop: connected && mode !== "Disconnected",
    reset: connected && (mode === "EStop" || mode === "Fault"),
  };
}

export function formatTimer(timerMs: number): string {
  const total = Math.floor(timerMs / 100) / 10; // tenths of a second
  const minutes = Math.floor(total / 60);
  const seconds = (total - minutes * 60).toFixed(1).padStart(4, "0");
  return `${String(minutes).padStart(2, "0")}:${seconds}`;
}
