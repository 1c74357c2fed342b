"""Discrete user-action events recognized from the tracking stream.

Events are immutable values. Within one frame the emission order is fixed:
events sort by kind rank (the order of EVENT_KINDS below) and then by the
participating magnet ids, so identical streams always serialize identically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ParseError, SchemaError

# Rank order for deterministic within-frame emission.
EVENT_KINDS = (
    "detach",
    "cover_end",
    "unstack",
    "flip",
    "attach",
    "stack",
    "slide_end",
    "rotate_delta",
    "full_revolution",
    "tap",
    "hold_end",
    "hold_begin",
    "point_dwell",
    "cover_begin",
    "moved_apart",
    "bring_closer",
)
_RANK = {kind: i for i, kind in enumerate(EVENT_KINDS)}

# Kinds that coordinate multiple magnets at once; everything else involves a
# single magnet. Sequential coordination (tap pairs and the like) only exists
# at the command-mapping level, so no recognizer event carries it.
_MULTI_KINDS = {"stack", "unstack", "bring_closer", "moved_apart"}


@dataclass(frozen=True)
class UserActionEvent:
    t_ms: int
    kind: str
    magnet: str
    magnet_b: str = ""
    xy: tuple[float, float] | None = None
    from_xy: tuple[float, float] | None = None
    to_xy: tuple[float, float] | None = None
    degrees: float = 0.0
    direction: str = ""
    new_side: str = ""
    duration_ms: int = 0

    @property
    def multiplexity(self) -> str:
        return "multi-simultaneous" if self.kind in _MULTI_KINDS else "single"

    @property
    def rank(self) -> int:
        return _RANK[self.kind]

    def sort_key(self) -> tuple:
        return (self.rank, self.magnet, self.magnet_b)

    def magnets(self) -> tuple[str, ...]:
        return (self.magnet, self.magnet_b) if self.magnet_b else (self.magnet,)

    def signature(self) -> tuple:
        """Kind plus participants, ignoring timestamps and payload geometry."""
        return (self.kind,) + self.magnets()


def attach(t: int, magnet: str, xy: tuple[float, float]) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="attach", magnet=magnet, xy=xy)


def detach(t: int, magnet: str, last_xy: tuple[float, float]) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="detach", magnet=magnet, xy=last_xy)


def slide_end(t, magnet, from_xy, to_xy) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="slide_end", magnet=magnet, from_xy=from_xy, to_xy=to_xy)


def rotate_delta(t, magnet, degrees: float) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="rotate_delta", magnet=magnet, degrees=degrees)


def full_revolution(t, magnet, direction: str) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="full_revolution", magnet=magnet, direction=direction)


def flip(t, magnet, new_side: str) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="flip", magnet=magnet, new_side=new_side)


def stack(t, top: str, base: str) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="stack", magnet=top, magnet_b=base)


def unstack(t, top: str, base: str) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="unstack", magnet=top, magnet_b=base)


def tap(t, magnet) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="tap", magnet=magnet)


def hold_begin(t, magnet) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="hold_begin", magnet=magnet)


def hold_end(t, magnet, duration_ms: int) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="hold_end", magnet=magnet, duration_ms=duration_ms)


def point_dwell(t, magnet) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="point_dwell", magnet=magnet)


def bring_closer(t, a: str, b: str) -> UserActionEvent:
    a, b = sorted((a, b))
    return UserActionEvent(t_ms=t, kind="bring_closer", magnet=a, magnet_b=b)


def moved_apart(t, a: str, b: str) -> UserActionEvent:
    a, b = sorted((a, b))
    return UserActionEvent(t_ms=t, kind="moved_apart", magnet=a, magnet_b=b)


def cover_begin(t, magnet) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="cover_begin", magnet=magnet)


def cover_end(t, magnet) -> UserActionEvent:
    return UserActionEvent(t_ms=t, kind="cover_end", magnet=magnet)


# --------------------------------------------------------------------------
# line-delimited record serialization (same style as frame records)


def event_to_dict(ev: UserActionEvent) -> dict:
    out: dict = {"t": ev.t_ms, "kind": ev.kind, "magnet": ev.magnet}
    if ev.magnet_b:
        out["magnet_b"] = ev.magnet_b
    if ev.xy is not None:
        out["xy"] = list(ev.xy)
    if ev.from_xy is not None:
        out["from_xy"] = list(ev.from_xy)
    if ev.to_xy is not None:
        out["to_xy"] = list(ev.to_xy)
    if ev.kind == "rotate_delta":
        out["degrees"] = ev.degrees
    if ev.direction:
        out["direction"] = ev.direction
    if ev.new_side:
        out["new_side"] = ev.new_side
    if ev.kind == "hold_end":
        out["duration_ms"] = ev.duration_ms
    out["multiplexity"] = ev.multiplexity
    return out


def serialize_event(ev: UserActionEvent) -> str:
    return json.dumps(event_to_dict(ev), sort_keys=True)


def parse_event(record: str) -> UserActionEvent:
    try:
        data = json.loads(record)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed event record: {exc.msg}", column=exc.colno) from exc
    kind = data.get("kind")
    if kind not in _RANK:
        raise SchemaError(f"unknown event kind {kind!r}")
    return UserActionEvent(
        t_ms=int(data["t"]),
        kind=kind,
        magnet=data["magnet"],
        magnet_b=data.get("magnet_b", ""),
        xy=tuple(data["xy"]) if "xy" in data else None,
        from_xy=tuple(data["from_xy"]) if "from_xy" in data else None,
        to_xy=tuple(data["to_xy"]) if "to_xy" in data else None,
        degrees=float(data.get("degrees", 0.0)),
        direction=data.get("direction", ""),
        new_side=data.get("new_side", ""),
        duration_ms=int(data.get("duration_ms", 0)),
    )


def serialize_events(events: list[UserActionEvent]) -> str:
    return "".join(serialize_event(ev) + "\n" for ev in events)


def parse_events(text: str) -> list[UserActionEvent]:
    return [parse_event(line) for line in text.splitlines() if line.strip()]
