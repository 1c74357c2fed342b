"""High-level gesture scripts expanded into deterministic frame streams.

A script is ground truth: place/remove control marker presence, glide and
spin interpolate pose linearly, flip swaps the visible face, touch and hover
attach a fingertip to a magnet (with and without contact), handoff parks a
free fingertip at a fixed point, and occlude suppresses a marker without
touching the underlying pose. Expansion samples the timeline on an integer
millisecond grid, so identical inputs always produce byte-identical streams.

Interval primitives are half-open: active at sample times t0 <= t < t1.
Instantaneous primitives (place, remove, flip) take effect at t' >= t.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ParseError, RangeError, ReferentialError, SchemaError, ScriptConflict
from .frames import HandObservation, MarkerObservation, ObservationFrame, sample_times
from .geometry import lerp_point, quantize_degrees, wrap_degrees
from .story import MagnetSpec

INTERVAL_OPS = ("glide", "spin", "touch", "hover", "handoff", "occlude")
INSTANT_OPS = ("place", "remove", "flip")
HAND_OPS = ("touch", "hover", "handoff")


@dataclass(frozen=True)
class ScriptStep:
    op: str
    magnet: str = ""
    side: str = "a"
    xy: tuple[float, float] | None = None
    from_xy: tuple[float, float] | None = None
    to_xy: tuple[float, float] | None = None
    delta_deg: float = 0.0
    rot: float = 0.0
    t: int = 0
    t0: int = 0
    t1: int = 0

    def span(self) -> tuple[int, int]:
        if self.op in INSTANT_OPS:
            return (self.t, self.t)
        return (self.t0, self.t1)


@dataclass(frozen=True)
class GestureScript:
    rate_hz: float
    steps: tuple[ScriptStep, ...] = ()
    duration_ms: int = 0

    def end_ms(self) -> int:
        end = self.duration_ms
        for s in self.steps:
            end = max(end, s.span()[1])
        return end


def _check_step(step: ScriptStep) -> None:
    if step.op not in INTERVAL_OPS + INSTANT_OPS:
        raise SchemaError(f"unknown script op {step.op!r}")
    lo, hi = step.span()
    if lo < 0:
        raise ScriptConflict(f"{step.op} at t={lo}: times must be non-negative")
    if step.op in INTERVAL_OPS and hi <= lo:
        raise ScriptConflict(f"{step.op} interval [{lo}, {hi}) is empty")
    if step.op == "place":
        if step.xy is None:
            raise SchemaError("place requires xy")
        if step.side not in ("a", "b"):
            raise SchemaError(f"place side must be 'a' or 'b', got {step.side!r}")
    if step.op == "glide" and (step.from_xy is None or step.to_xy is None):
        raise SchemaError("glide requires from_xy and to_xy")
    if step.op == "handoff" and step.xy is None:
        raise SchemaError("handoff requires xy")


def _overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def validate_script(script: GestureScript, roster: dict[str, MagnetSpec]) -> None:
    """Raise ScriptConflict / SchemaError / ReferentialError on a bad script."""
    if script.rate_hz <= 0:
        raise RangeError(f"script rate must be positive, got {script.rate_hz}")
    for step in script.steps:
        _check_step(step)
        if step.op != "handoff" and step.magnet and step.magnet not in roster:
            raise ReferentialError(f"script references unknown magnet {step.magnet!r}")

    by_magnet: dict[str, list[ScriptStep]] = {}
    for step in script.steps:
        if step.op != "handoff":
            by_magnet.setdefault(step.magnet, []).append(step)

    for magnet, steps in sorted(by_magnet.items()):
        for group in (("glide",), ("spin",), ("touch", "hover"), ("occlude",)):
            spans = sorted(s.span() for s in steps if s.op in group)
            for prev, curr in zip(spans, spans[1:]):
                if _overlap(prev, curr):
                    raise ScriptConflict(
                        f"magnet {magnet}: overlapping {'/'.join(group)} intervals {prev} and {curr}"
                    )
        # presence choreography: place/remove must alternate, flips only while placed
        presence = sorted(
            (s for s in steps if s.op in ("place", "remove")), key=lambda s: (s.t, s.op)
        )
        present = False
        for s in presence:
            if s.op == "place":
                if present:
                    raise ScriptConflict(f"magnet {magnet}: place at t={s.t} while already placed")
                present = True
            else:
                if not present:
                    raise ScriptConflict(f"magnet {magnet}: remove at t={s.t} while not placed")
                present = False
        for s in steps:
            if s.op == "flip" and not _present_at(presence, s.t):
                raise ScriptConflict(f"magnet {magnet}: flip at t={s.t} while not placed")


def _present_at(presence_steps: list[ScriptStep], t: int) -> bool:
    present = False
    for s in presence_steps:
        if s.t > t:
            break
        present = s.op == "place"
    return present


class _MagnetTimeline:
    """Evaluates ground-truth pose/visibility for one magnet at any time."""

    def __init__(self, magnet: MagnetSpec, steps: list[ScriptStep]):
        self.magnet = magnet
        self.places = sorted((s for s in steps if s.op in ("place", "remove")), key=lambda s: s.t)
        self.flips = sorted((s.t for s in steps if s.op == "flip"))
        self.glides = sorted((s for s in steps if s.op == "glide"), key=lambda s: s.t0)
        self.spins = sorted((s for s in steps if s.op == "spin"), key=lambda s: s.t0)
        self.occludes = sorted((s.span() for s in steps if s.op == "occlude"))

    def present(self, t: int) -> bool:
        return _present_at(self.places, t)

    def occluded(self, t: int) -> bool:
        return any(lo <= t < hi for lo, hi in self.occludes)

    def side(self, t: int) -> str:
        base = "a"
        for s in self.places:
            if s.t > t:
                break
            if s.op == "place":
                base = s.side
        flips = sum(1 for ft in self.flips if ft <= t)
        if flips % 2 == 1:
            return "b" if base == "a" else "a"
        return base

    def position(self, t: int) -> tuple[float, float]:
        pos = (0.5, 0.5)
        for s in self.places:
            if s.t > t:
                break
            if s.op == "place" and s.xy is not None:
                pos = s.xy
        for g in self.glides:
            if t < g.t0:
                break
            if t < g.t1:
                frac = (t - g.t0) / (g.t1 - g.t0)
                pos = lerp_point(g.from_xy, g.to_xy, frac)  # type: ignore[arg-type]
            else:
                pos = g.to_xy  # type: ignore[assignment]
        return pos

    def rotation(self, t: int) -> float:
        rot = 0.0
        for s in self.places:
            if s.t > t:
                break
            if s.op == "place":
                rot = s.rot
        for sp in self.spins:
            if t < sp.t0:
                break
            if t < sp.t1:
                rot += sp.delta_deg * (t - sp.t0) / (sp.t1 - sp.t0)
            else:
                rot += sp.delta_deg
        return wrap_degrees(rot)

    def observation(self, t: int) -> MarkerObservation | None:
        if not self.present(t) or self.occluded(t):
            return None
        return MarkerObservation(
            fiducial_id=self.magnet.side_marker(self.side(t)),
            center=self.position(t),
            rotation_deg=quantize_degrees(self.rotation(t)),
        )


def script_scenario(
    script: GestureScript, magnets: list[MagnetSpec] | dict[str, MagnetSpec]
) -> list[ObservationFrame]:
    """Expand a script into the deterministic frame stream it describes."""
    roster = (
        {m.magnet_id: m for m in magnets} if not isinstance(magnets, dict) else dict(magnets)
    )
    validate_script(script, roster)
    end = script.end_ms()
    if end <= 0:
        return []

    timelines = {
        magnet_id: _MagnetTimeline(
            roster[magnet_id],
            [s for s in script.steps if s.op != "handoff" and s.magnet == magnet_id],
        )
        for magnet_id in sorted({s.magnet for s in script.steps if s.op != "handoff" and s.magnet})
    }
    hand_steps = [s for s in script.steps if s.op in HAND_OPS]

    out: list[ObservationFrame] = []
    for t in sample_times(0, end, script.rate_hz):
        markers = []
        for magnet_id in sorted(timelines):
            obs = timelines[magnet_id].observation(t)
            if obs is not None:
                markers.append(obs)
        hands = []
        for hand_id, step in enumerate(hand_steps):
            if not (step.t0 <= t < step.t1):
                continue
            if step.op == "handoff":
                tip = step.xy
            else:
                tip = timelines[step.magnet].position(t)
            hands.append(
                HandObservation(hand_id=hand_id, fingertip=tip, contact=step.op == "touch")
            )
        out.append(ObservationFrame(t_ms=t, markers=tuple(markers), hands=tuple(hands)))
    return out


# --------------------------------------------------------------------------
# script file I/O (used by the CLI, fixtures, and the frontend's test assets)


def script_to_dict(script: GestureScript) -> dict:
    steps = []
    for s in script.steps:
        entry: dict = {"op": s.op}
        if s.op != "handoff" and s.magnet:
            entry["magnet"] = s.magnet
        if s.op == "place":
            entry.update({"side": s.side, "xy": list(s.xy), "t": s.t})
            if s.rot:
                entry["rot"] = s.rot
        elif s.op in ("remove", "flip"):
            entry["t"] = s.t
        elif s.op == "glide":
            entry.update({"from": list(s.from_xy), "to": list(s.to_xy), "t0": s.t0, "t1": s.t1})
        elif s.op == "spin":
            entry.update({"delta_deg": s.delta_deg, "t0": s.t0, "t1": s.t1})
        elif s.op == "handoff":
            entry.update({"xy": list(s.xy), "t0": s.t0, "t1": s.t1})
        else:  # touch / hover / occlude
            entry.update({"t0": s.t0, "t1": s.t1})
        steps.append(entry)
    return {"rate_hz": script.rate_hz, "duration_ms": script.duration_ms, "steps": steps}


def serialize_script(script: GestureScript) -> str:
    return json.dumps(script_to_dict(script), indent=2, sort_keys=True) + "\n"


def _step_from_dict(data: dict) -> ScriptStep:
    op = data.get("op")
    if not isinstance(op, str):
        raise SchemaError(f"script step missing op: {data!r}")
    kwargs: dict = {"op": op}
    if "magnet" in data:
        kwargs["magnet"] = data["magnet"]
    if op == "place":
        kwargs.update(
            side=data.get("side", "a"),
            xy=tuple(data["xy"]),
            t=int(data["t"]),
            rot=float(data.get("rot", 0.0)),
        )
    elif op in ("remove", "flip"):
        kwargs["t"] = int(data["t"])
    elif op == "glide":
        kwargs.update(
            from_xy=tuple(data["from"]), to_xy=tuple(data["to"]),
            t0=int(data["t0"]), t1=int(data["t1"]),
        )
    elif op == "spin":
        kwargs.update(delta_deg=float(data["delta_deg"]), t0=int(data["t0"]), t1=int(data["t1"]))
    elif op == "handoff":
        kwargs.update(xy=tuple(data["xy"]), t0=int(data["t0"]), t1=int(data["t1"]))
    elif op in ("touch", "hover", "occlude"):
        kwargs.update(t0=int(data["t0"]), t1=int(data["t1"]))
    else:
        raise SchemaError(f"unknown script op {op!r}")
    return ScriptStep(**kwargs)


def parse_script(text: bytes | str) -> GestureScript:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed script: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise SchemaError("script must be a JSON object")
    try:
        steps = tuple(_step_from_dict(s) for s in data.get("steps", []))
        return GestureScript(
            rate_hz=float(data["rate_hz"]),
            steps=steps,
            duration_ms=int(data.get("duration_ms", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad script: {exc}") from exc
