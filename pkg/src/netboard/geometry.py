"""Small geometry helpers used across the engine.

All coordinates are normalized board units: origin at the top-left corner,
x along the long edge, y down, both in [0, 1]. Rotations are degrees in
[0, 360) measured clockwise. Timestamps are integer milliseconds.
"""
from __future__ import annotations

import math

# Coordinates are quantized to this many decimals at protocol boundaries so
# that serialized records round-trip exactly.
COORD_DECIMALS = 6


def quantize(value: float) -> float:
    """Quantize a coordinate-like value to the protocol precision."""
    return round(float(value), COORD_DECIMALS)


def wrap_degrees(deg: float) -> float:
    """Wrap an angle into [0, 360)."""
    wrapped = math.fmod(deg, 360.0)
    if wrapped < 0.0:
        wrapped += 360.0
    # fmod can return 360.0 - epsilon which quantizes back up to 360.0
    if wrapped >= 360.0:
        wrapped -= 360.0
    return wrapped


def quantize_degrees(deg: float) -> float:
    """Quantize an angle and keep it inside [0, 360)."""
    q = round(wrap_degrees(deg), COORD_DECIMALS)
    return 0.0 if q >= 360.0 else q


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def clamp_point(xy: tuple[float, float]) -> tuple[float, float]:
    return (clamp(xy[0], 0.0, 1.0), clamp(xy[1], 0.0, 1.0))


def dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def lerp(a: float, b: float, frac: float) -> float:
    return a + (b - a) * frac


def lerp_point(
    a: tuple[float, float], b: tuple[float, float], frac: float
) -> tuple[float, float]:
    return (lerp(a[0], b[0], frac), lerp(a[1], b[1], frac))


def shortest_angle_delta(prev_deg: float, curr_deg: float) -> float:
    """Signed angular step from prev to curr, the unique delta in (-180, 180]."""
    delta = math.fmod(curr_deg - prev_deg, 360.0)
    if delta > 180.0:
        delta -= 360.0
    elif delta <= -180.0:
        delta += 360.0
    return delta


def lerp_degrees(a: float, b: float, frac: float) -> float:
    """Interpolate angles along the shortest arc, result wrapped to [0, 360)."""
    return wrap_degrees(a + shortest_angle_delta(a, b) * frac)


def convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Andrew monotone chain. Returns hull vertices in counter-clockwise order."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def disc_hull(
    discs: list[tuple[float, float, float]], samples: int = 16
) -> list[tuple[float, float]]:
    """Convex hull of a set of discs (cx, cy, r), approximated by boundary samples."""
    points: list[tuple[float, float]] = []
    for cx, cy, r in discs:
        for k in range(samples):
            theta = 2.0 * math.pi * k / samples
            points.append((cx + r * math.cos(theta), cy + r * math.sin(theta)))
    return convex_hull(points)
