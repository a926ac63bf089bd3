"""Therapy routines: recording, interpolation, resampling, file round trip.

A Routine is a time-stamped sequence of wrist poses and is the unit of
recording, storage, analysis, and playback. Routines are treated as
immutable values once built; every operation here returns a new one.

File format (UTF-8, LF, '.' decimal separator)::

    # wristlab-routine v1
    # name=<text>
    # <key>=<value>          (optional extra metadata lines)
    t_ms,theta_dp_deg,theta_cr_deg
    0,0.0000,1.5000
    20,0.3411,1.4987

Canonical serialization writes the name line first, remaining metadata in
sorted key order, and angles with exactly four decimals. Parsers accept
extra metadata lines and arbitrary float precision.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import MonotonicityError, NotPlayableError, RoutineFormatError
from .model import JointPose
from .safety import SafetyEnvelope

FILE_MAGIC = "# wristlab-routine v1"
FILE_HEADER = "t_ms,theta_dp_deg,theta_cr_deg"


@dataclass(frozen=True)
class RoutineSample:
    """One captured pose, t_ms milliseconds after routine start."""

    t_ms: int
    pose: JointPose

    def __post_init__(self):
        if int(self.t_ms) != self.t_ms or self.t_ms < 0:
            raise ValueError(f"t_ms must be a non-negative integer, got {self.t_ms!r}")


@dataclass(eq=True)
class Routine:
    """Named, strictly time-ordered pose sequence plus free-form metadata.

    Mutating a Routine after construction is not supported; build a new
    one instead (the recorder accumulates raw samples and constructs the
    routine only when recording stops).
    """

    name: str
    samples: tuple[RoutineSample, ...]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.samples = tuple(self.samples)
        last = -1
        for s in self.samples:
            if s.t_ms <= last:
                raise MonotonicityError(
                    f"t_ms {s.t_ms} not greater than previous {last}"
                )
            last = s.t_ms

    @property
    def duration_ms(self) -> int:
        if not self.samples:
            return 0
        return self.samples[-1].t_ms - self.samples[0].t_ms

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = np.array([s.t_ms for s in self.samples], dtype=np.int64)
        dp = np.array([s.pose.theta_dp for s in self.samples], dtype=float)
        cr = np.array([s.pose.theta_cr for s in self.samples], dtype=float)
        return t, dp, cr

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(t_ms, theta_dp, theta_cr) as numpy arrays."""
        return self._arrays

    def normalized(self) -> "Routine":
        """Shift timestamps so the first sample sits at t_ms = 0."""
        if not self.samples or self.samples[0].t_ms == 0:
            return self
        t0 = self.samples[0].t_ms
        shifted = tuple(RoutineSample(s.t_ms - t0, s.pose) for s in self.samples)
        return Routine(self.name, shifted, dict(self.meta))


def append_sample(routine: Routine, sample: RoutineSample) -> Routine:
    """Extend a routine by one sample; timestamps must strictly increase."""
    if routine.samples and sample.t_ms <= routine.samples[-1].t_ms:
        raise MonotonicityError(
            f"t_ms {sample.t_ms} not greater than last {routine.samples[-1].t_ms}"
        )
    return Routine(routine.name, routine.samples + (sample,), dict(routine.meta))


def sample_at(routine: Routine, t_ms: float) -> JointPose:
    """Pose at time t by linear interpolation between bracketing samples.

    Clamps to the first/last pose outside the recorded span, so playback
    can never extrapolate. Exact on stored grid points.
    """
    if len(routine.samples) < 2:
        raise NotPlayableError("routine needs at least 2 samples for playback")
    times, dp, cr = routine.as_arrays()
    if t_ms <= times[0]:
        return routine.samples[0].pose
    if t_ms >= times[-1]:
        return routine.samples[-1].pose
    i = bisect_right(times, t_ms)  # times[i-1] <= t < times[i]
    t0, t1 = times[i - 1], times[i]
    if t_ms == t0:
        return routine.samples[i - 1].pose
    u = (t_ms - t0) / (t1 - t0)
    return JointPose(
        dp[i - 1] + u * (dp[i] - dp[i - 1]),
        cr[i - 1] + u * (cr[i] - cr[i - 1]),
    )


def resample(routine: Routine, dt_ms: int) -> Routine:
    """Rebuild the routine on the uniform grid 0, dt, 2dt, ... covering its
    duration; values come from sample_at.

    The grid end rounds up to the next multiple of dt, where the clamp in
    sample_at holds the final pose, so endpoint poses survive exactly.
    Analysis requires this uniform grid.
    """
    if dt_ms < 1 or int(dt_ms) != dt_ms:
        raise ValueError("dt_ms must be an integer >= 1")
    if len(routine.samples) < 2:
        raise NotPlayableError("routine needs at least 2 samples to resample")
    dt_ms = int(dt_ms)
    end = routine.samples[-1].t_ms
    n = -(-end // dt_ms)  # ceil
    samples = tuple(
        RoutineSample(k * dt_ms, sample_at(routine, k * dt_ms)) for k in range(n + 1)
    )
    return Routine(routine.name, samples, dict(routine.meta))


def smooth(routine: Routine, window: int) -> Routine:
    """Centered moving average per axis with an odd window.

    The half-width shrinks symmetrically near the ends, so the window is
    always centered and the endpoints pass through unchanged. window=1 is
    the identity. Output never leaves the input's per-axis min/max.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 1")
    if window == 1 or len(routine.samples) <= 2:
        return routine
    times, dp, cr = routine.as_arrays()
    n = len(times)
    half = window // 2
    csum_dp = np.concatenate(([0.0], np.cumsum(dp)))
    csum_cr = np.concatenate(([0.0], np.cumsum(cr)))
    out = []
    for i in range(n):
        h = min(half, i, n - 1 - i)
        lo, hi = i - h, i + h + 1
        width = hi - lo
        out.append(
            RoutineSample(
                int(times[i]),
                JointPose(
                    (csum_dp[hi] - csum_dp[lo]) / width,
                    (csum_cr[hi] - csum_cr[lo]) / width,
                ),
            )
        )
    return Routine(routine.name, tuple(out), dict(routine.meta))


def quantize_deg(value: float) -> float:
    """Snap an angle to the canonical file resolution (four decimals), so
    that in-memory values survive serialize/parse unchanged."""
    return float(np.round(value, 4))


def generate_demo(
    duration_ms: int,
    freq_hz: float,
    rom: SafetyEnvelope,
    dt_ms: int = 20,
    name: str = "demo",
) -> Routine:
    """Synthesize the growing-arc exercise: circular motion whose arc
    widens over the session.

    theta_dp follows A(t)*sin(2*pi*f*t) and theta_cr follows
    B(t)*cos(2*pi*f*t), with each amplitude ramping linearly from 10% to
    100% of the tightest symmetric range-of-motion bound on its axis. The
    result always passes the range-of-motion check.
    """
    if duration_ms <= 0:
        raise ValueError("duration_ms must be > 0")
    if freq_hz <= 0:
        raise ValueError("freq_hz must be > 0")
    if dt_ms < 1:
        raise ValueError("dt_ms must be >= 1")
    a_dp = min(-rom.dp_min, rom.dp_max)
    a_cr = min(-rom.cr_min, rom.cr_max)
    if a_dp <= 0 or a_cr <= 0:
        raise ValueError("range-of-motion bounds must straddle zero")

    t = np.arange(0, duration_ms + 1, dt_ms, dtype=np.int64)
    ramp = 0.1 + 0.9 * (t / duration_ms)
    phase = 2.0 * math.pi * freq_hz * (t / 1000.0)
    dp = np.round(a_dp * ramp * np.sin(phase), 4)
    cr = np.round(a_cr * ramp * np.cos(phase), 4)
    samples = tuple(
        RoutineSample(int(ti), JointPose(float(d), float(c)))
        for ti, d, c in zip(t, dp, cr)
    )
    return Routine(name, samples, {"kind": "demo", "freq_hz": repr(float(freq_hz))})


def serialize(routine: Routine) -> bytes:
    """Canonical file form; parse(serialize(r)) == r field for field."""
    if "\n" in routine.name or "\r" in routine.name:
        raise ValueError("routine name must not contain newlines")
    lines = [FILE_MAGIC, f"# name={routine.name}"]
    for key in sorted(routine.meta):
        value = routine.meta[key]
        if key == "name" or "=" in key or any(c in "\r\n" for c in key + value):
            raise ValueError(f"bad metadata entry {key!r}")
        lines.append(f"# {key}={value}")
    lines.append(FILE_HEADER)
    for s in routine.samples:
        lines.append(f"{s.t_ms},{s.pose.theta_dp:.4f},{s.pose.theta_cr:.4f}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse(data: bytes | str) -> Routine:
    """Read a routine file, reporting the line number of the first defect."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise RoutineFormatError(0, f"not valid UTF-8: {exc}") from None
    else:
        text = data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline

    if not lines or lines[0] != FILE_MAGIC:
        raise RoutineFormatError(1, f"expected magic line {FILE_MAGIC!r}")

    name = ""
    meta: dict[str, str] = {}
    idx = 1
    while idx < len(lines) and lines[idx].startswith("#"):
        body = lines[idx][1:]
        if "=" not in body:
            raise RoutineFormatError(idx + 1, "metadata line must be '# key=value'")
        key, _, value = body.partition("=")
        key = key.strip()  # the value keeps its whitespace verbatim
        if key == "name":
            name = value
        else:
            meta[key] = value
        idx += 1

    if idx >= len(lines) or lines[idx] != FILE_HEADER:
        raise RoutineFormatError(idx + 1, f"expected header {FILE_HEADER!r}")
    idx += 1

    samples = []
    last_t = -1
    for line_no in range(idx, len(lines)):
        line = lines[line_no]
        if line == "":
            raise RoutineFormatError(line_no + 1, "blank line inside data section")
        fields = line.split(",")
        if len(fields) != 3:
            raise RoutineFormatError(
                line_no + 1, f"expected 3 comma-separated fields, got {len(fields)}"
            )
        try:
            t_ms = int(fields[0])
        except ValueError:
            raise RoutineFormatError(
                line_no + 1, f"t_ms is not an integer: {fields[0]!r}"
            ) from None
        try:
            dp = float(fields[1])
            cr = float(fields[2])
        except ValueError:
            raise RoutineFormatError(
                line_no + 1, f"non-numeric angle field in {line!r}"
            ) from None
        if not (math.isfinite(dp) and math.isfinite(cr)):
            raise RoutineFormatError(line_no + 1, "angle fields must be finite")
        if t_ms < 0:
            raise RoutineFormatError(line_no + 1, f"negative t_ms {t_ms}")
        if t_ms <= last_t:
            raise RoutineFormatError(
                line_no + 1, f"t_ms {t_ms} not greater than previous {last_t}"
            )
        last_t = t_ms
        samples.append(RoutineSample(t_ms, JointPose(dp, cr)))

    return Routine(name, tuple(samples), meta)
