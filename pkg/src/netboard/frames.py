"""Normalized sensing protocol: marker poses and fingertip observations.

One frame per line of JSON (``*.frames.jsonl``); the identical records travel
over the live session transport. Coordinates are normalized board units in
[0, 1], rotations degrees in [0, 360) clockwise, timestamps integer
milliseconds, strictly increasing across a stream.

All float fields are quantized to six decimals when an observation is
constructed, so the canonical fixed-decimal serialization round-trips to an
identical frame.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, RangeError, RateError, TimestampError
from .geometry import lerp, lerp_degrees, quantize, quantize_degrees


@dataclass(frozen=True)
class MarkerObservation:
    fiducial_id: int
    center: tuple[float, float]
    rotation_deg: float = 0.0
    confidence: float = 1.0

    def __post_init__(self):
        x, y = (quantize(self.center[0]), quantize(self.center[1]))
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise RangeError(f"marker {self.fiducial_id}: center ({x}, {y}) outside [0,1]^2")
        rot = quantize(self.rotation_deg)
        if not (0.0 <= rot < 360.0):
            raise RangeError(f"marker {self.fiducial_id}: rotation {rot} outside [0, 360)")
        conf = quantize(self.confidence)
        if not (0.0 <= conf <= 1.0):
            raise RangeError(f"marker {self.fiducial_id}: confidence {conf} outside [0, 1]")
        object.__setattr__(self, "center", (x, y))
        object.__setattr__(self, "rotation_deg", rot)
        object.__setattr__(self, "confidence", conf)


@dataclass(frozen=True)
class HandObservation:
    hand_id: int
    fingertip: tuple[float, float]
    contact: bool = False

    def __post_init__(self):
        x, y = (quantize(self.fingertip[0]), quantize(self.fingertip[1]))
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise RangeError(f"hand {self.hand_id}: fingertip ({x}, {y}) outside [0,1]^2")
        object.__setattr__(self, "fingertip", (x, y))


@dataclass(frozen=True)
class ObservationFrame:
    t_ms: int
    markers: tuple[MarkerObservation, ...] = ()
    hands: tuple[HandObservation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "markers", tuple(sorted(self.markers, key=lambda m: m.fiducial_id)))
        object.__setattr__(self, "hands", tuple(sorted(self.hands, key=lambda h: h.hand_id)))
        ids = [m.fiducial_id for m in self.markers]
        if len(ids) != len(set(ids)):
            raise RangeError(f"frame t={self.t_ms}: duplicate fiducial ids {ids}")

    def marker(self, fiducial_id: int) -> MarkerObservation | None:
        for m in self.markers:
            if m.fiducial_id == fiducial_id:
                return m
        return None


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def parse_frame(record: str) -> ObservationFrame:
    """Parse one line of the frame stream format."""
    try:
        data = json.loads(record)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed frame record: {exc.msg}", column=exc.colno) from exc
    if not isinstance(data, dict) or "t" not in data:
        raise ParseError("frame record must be an object with a 't' field")
    t = data["t"]
    if not isinstance(t, int) or isinstance(t, bool):
        raise ParseError(f"frame timestamp must be an integer, got {t!r}")
    markers = []
    for m in data.get("markers", []):
        try:
            markers.append(
                MarkerObservation(
                    fiducial_id=int(m["id"]),
                    center=(float(m["x"]), float(m["y"])),
                    rotation_deg=float(m.get("rot", 0.0)),
                    confidence=float(m.get("conf", 1.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad marker entry {m!r}: {exc}") from exc
    hands = []
    for h in data.get("hands", []):
        try:
            hands.append(
                HandObservation(
                    hand_id=int(h["id"]),
                    fingertip=(float(h["x"]), float(h["y"])),
                    contact=bool(h["contact"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad hand entry {h!r}: {exc}") from exc
    return ObservationFrame(t_ms=t, markers=tuple(markers), hands=tuple(hands))


def serialize_frame(frame: ObservationFrame) -> str:
    """Canonical single-line record: fixed decimals, ids sorted."""
    parts = [f'{{"t": {frame.t_ms}, "markers": [']
    parts.append(
        ", ".join(
            f'{{"id": {m.fiducial_id}, "x": {_fmt(m.center[0])}, "y": {_fmt(m.center[1])}, '
            f'"rot": {_fmt(m.rotation_deg)}, "conf": {_fmt(m.confidence)}}}'
            for m in frame.markers
        )
    )
    parts.append('], "hands": [')
    parts.append(
        ", ".join(
            f'{{"id": {h.hand_id}, "x": {_fmt(h.fingertip[0])}, "y": {_fmt(h.fingertip[1])}, '
            f'"contact": {"true" if h.contact else "false"}}}'
            for h in frame.hands
        )
    )
    parts.append("]}")
    return "".join(parts)


def parse_stream(text: str) -> list[ObservationFrame]:
    """Parse a whole line-delimited stream, enforcing strictly increasing times."""
    frames: list[ObservationFrame] = []
    last_t: int | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            frame = parse_frame(line)
        except (ParseError, RangeError) as exc:
            raise ParseError(f"frame stream line {lineno}: {exc}", line=lineno) from exc
        if last_t is not None and frame.t_ms <= last_t:
            raise TimestampError(
                f"frame stream line {lineno}: t={frame.t_ms} not after t={last_t}"
            )
        last_t = frame.t_ms
        frames.append(frame)
    return frames


def serialize_stream(frames: list[ObservationFrame]) -> str:
    return "".join(serialize_frame(f) + "\n" for f in frames)


def sample_times(t_start: int, t_end: int, rate_hz: float) -> list[int]:
    """Integer-ms sample grid [t_start, t_end) at the given rate."""
    if rate_hz <= 0:
        raise RateError(f"rate must be positive, got {rate_hz}")
    period = 1000.0 / rate_hz
    times = []
    k = 0
    while True:
        t = t_start + round(k * period)
        if t >= t_end:
            break
        if not times or t > times[-1]:
            times.append(t)
        k += 1
    return times


def resample_stream(frames: list[ObservationFrame], new_rate_hz: float) -> list[ObservationFrame]:
    """Resample a stream at a new rate.

    Marker presence, sides, and hand contact are treated as piecewise-constant
    (the value holds from one frame until the next); positions and rotations
    are piecewise-linear between consecutive sightings of the same fiducial.
    """
    if new_rate_hz <= 0:
        raise RateError(f"rate must be positive, got {new_rate_hz}")
    if not frames:
        return []
    for prev, curr in zip(frames, frames[1:]):
        if curr.t_ms <= prev.t_ms:
            raise TimestampError(f"input not strictly increasing at t={curr.t_ms}")

    t0, t1 = frames[0].t_ms, frames[-1].t_ms
    times = sample_times(t0, t1 + 1, new_rate_hz)

    out: list[ObservationFrame] = []
    idx = 0
    for t in times:
        while idx + 1 < len(frames) and frames[idx + 1].t_ms <= t:
            idx += 1
        base = frames[idx]
        nxt = frames[idx + 1] if idx + 1 < len(frames) else None
        markers = []
        for m in base.markers:
            follow = nxt.marker(m.fiducial_id) if nxt is not None else None
            if follow is None or nxt is None or nxt.t_ms == base.t_ms:
                markers.append(m)
            else:
                frac = (t - base.t_ms) / (nxt.t_ms - base.t_ms)
                markers.append(
                    MarkerObservation(
                        fiducial_id=m.fiducial_id,
                        center=(
                            lerp(m.center[0], follow.center[0], frac),
                            lerp(m.center[1], follow.center[1], frac),
                        ),
                        rotation_deg=quantize_degrees(
                            lerp_degrees(m.rotation_deg, follow.rotation_deg, frac)
                        ),
                        confidence=min(m.confidence, follow.confidence),
                    )
                )
        out.append(ObservationFrame(t_ms=t, markers=tuple(markers), hands=base.hands))
    return out
