"""Whole-stream reference evaluation of the recognizer semantics.

This is the differential-testing counterpart of ``recognizer.py``: the same
threshold semantics (documented there) evaluated non-incrementally. A first
sweep resolves attachment, flips, covers, stacking, and detaches into
per-frame tables; motion, touch, dwell, and proximity are then derived from
those tables by run extraction rather than by per-frame mutable tracks. Any
divergence from the incremental machine is a bug in one of the two.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import events as ev
from .errors import TimestampError
from .events import UserActionEvent
from .frames import ObservationFrame
from .geometry import dist, shortest_angle_delta
from .recognizer import RecognizerConfig
from .story import MagnetSpec

_END_RANKED = 10**9  # pseudo frame index for finalize emissions


@dataclass
class _SweepState:
    on: bool = False
    side: str = ""
    pose: tuple[float, float] | None = None
    rot: float | None = None
    seen_t: int | None = None
    run_start: int | None = None
    run_side: str = ""
    run_seen: int | None = None
    clock: int | None = None
    due: int | None = None
    cand: bool = False
    covered: bool = False
    on_base: str = ""
    topped_by: str = ""


@dataclass
class _Tables:
    times: list[int]
    on_at: dict[str, list[bool]]
    pose_at: dict[str, list[tuple[float, float] | None]]
    obs_at: dict[str, list[object]]  # marker feeding motion, or None
    resets: dict[str, set[int]]  # motion restart baselines (frame indices)
    events: list[tuple[int, UserActionEvent]] = field(default_factory=list)
    survivors: dict[str, _SweepState] = field(default_factory=dict)
    rot_survivor: dict[str, float] = field(default_factory=dict)


def batch_reference(
    frames: list[ObservationFrame],
    cfg: RecognizerConfig,
    roster: list[MagnetSpec] | dict[str, MagnetSpec],
    t_end_ms: int | None = None,
) -> list[UserActionEvent]:
    magnets = (
        {m.magnet_id: m for m in roster} if not isinstance(roster, dict) else dict(roster)
    )
    for prev, curr in zip(frames, frames[1:]):
        if curr.t_ms <= prev.t_ms:
            raise TimestampError(f"frame t={curr.t_ms} not after t={prev.t_ms}")
    if t_end_ms is None:
        t_end_ms = frames[-1].t_ms if frames else 0

    tables = _attachment_sweep(frames, cfg, magnets)
    _motion_pass(tables, cfg, magnets)
    _touch_and_dwell_pass(tables, cfg, magnets, frames, t_end_ms)
    _proximity_pass(tables, cfg, magnets)
    _finalize_pass(tables, cfg, magnets, t_end_ms)

    tables.events.sort(key=lambda pair: (pair[0],) + pair[1].sort_key())
    return [event for _, event in tables.events]


def _visible_sides(frame: ObservationFrame, magnets: dict[str, MagnetSpec]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for marker in frame.markers:
        for m in magnets.values():
            side = m.marker_side(marker.fiducial_id)
            if side is not None:
                out.setdefault(m.magnet_id, {})[side] = marker
                break
    return out


def _hand_near(frame: ObservationFrame, pose, radius: float, contact=None) -> bool:
    return any(
        (contact is None or hand.contact == contact) and dist(hand.fingertip, pose) <= radius
        for hand in frame.hands
    )


def _attachment_sweep(frames, cfg, magnets) -> _Tables:
    n = len(frames)
    times = [f.t_ms for f in frames]
    ids = sorted(magnets)
    tables = _Tables(
        times=times,
        on_at={m: [False] * n for m in ids},
        pose_at={m: [None] * n for m in ids},
        obs_at={m: [None] * n for m in ids},
        resets={m: set() for m in ids},
    )
    st = {m: _SweepState() for m in ids}
    tables.survivors = st

    def put(i: int, event: UserActionEvent) -> None:
        tables.events.append((i, event))

    for i, frame in enumerate(frames):
        t = frame.t_ms
        vis = _visible_sides(frame, magnets)
        for mid in ids:
            s = st[mid]
            spec = magnets[mid]
            sides = vis.get(mid, {})
            if not s.on:
                _sweep_pending(tables, st, s, mid, spec, sides, i, t, cfg, magnets, put)
            else:
                _sweep_attached(tables, st, s, mid, spec, sides, frame, i, t, cfg, magnets, put)
            tables.on_at[mid][i] = s.on
            tables.pose_at[mid][i] = s.pose if s.on else None
    return tables


def _sweep_pending(tables, st, s, mid, spec, sides, i, t, cfg, magnets, put) -> None:
    if not sides:
        if s.run_start is not None and s.run_seen is not None and t - s.run_seen >= cfg.t_detach_ms:
            s.run_start = None
            s.run_side = ""
            s.run_seen = None
        return
    side = s.run_side if s.run_side in sides else ("a" if "a" in sides else "b")
    marker = sides[side]
    if s.run_start is None or side != s.run_side:
        s.run_start, s.run_side = t, side
    elif t - s.run_seen >= cfg.t_detach_ms:
        s.run_start = t
    s.run_seen = t
    s.pose, s.rot, s.seen_t = marker.center, marker.rotation_deg, t
    if t - s.run_start < cfg.t_confirm_ms:
        return

    s.on, s.side = True, side
    s.run_start, s.run_side = None, ""
    s.clock = s.due = None
    s.cand = s.covered = False
    tables.resets[mid].add(i)
    tables.obs_at[mid][i] = marker

    base_id = ""
    if spec.role == "widget":
        best_d = None
        for other_id in sorted(magnets):
            o = st[other_id]
            o_spec = magnets[other_id]
            if other_id == mid or not o.on or o.topped_by or o_spec.role != "node-carrier":
                continue
            if o.pose is None:
                continue
            d = dist(s.pose, o.pose)
            if d <= cfg.r_stack * o_spec.diameter and (best_d is None or d < best_d):
                base_id, best_d = other_id, d
    if base_id:
        base = st[base_id]
        if base.covered:
            put(i, ev.cover_end(t, base_id))
        base.topped_by = mid
        base.clock = base.due = None
        base.cand = base.covered = False
        s.on_base = base_id
        put(i, ev.stack(t, mid, base_id))
    else:
        put(i, ev.attach(t, mid, s.pose))


def _sweep_attached(tables, st, s, mid, spec, sides, frame, i, t, cfg, magnets, put) -> None:
    if s.side in sides:
        seen_side = s.side
        marker = sides[seen_side]
        if s.due is not None:
            _sweep_drop(tables, st, s, mid, i, put)
            s.run_start, s.run_side, s.run_seen = t, seen_side, t
            s.pose, s.rot, s.seen_t = marker.center, marker.rotation_deg, t
            return
        if s.covered:
            put(i, ev.cover_end(t, mid))
        s.clock = s.due = None
        s.cand = s.covered = False
        if s.on_base:
            base = st[s.on_base]
            base_pose = base.pose if base.pose is not None else s.pose
            if dist(marker.center, base_pose) > cfg.r_stack * magnets[s.on_base].diameter:
                put(i, ev.unstack(t, mid, s.on_base))
                put(i, ev.attach(t, mid, marker.center))
                if base.topped_by == mid:
                    base.topped_by = ""
                    base.clock = t
                    base.cand = False
                s.on_base = ""
                s.pose, s.rot, s.seen_t = marker.center, marker.rotation_deg, t
                tables.resets[mid].add(i)
                tables.obs_at[mid][i] = marker
                return
        s.pose, s.rot, s.seen_t = marker.center, marker.rotation_deg, t
        tables.obs_at[mid][i] = marker
        return

    other = "b" if s.side == "a" else "a"
    if other in sides:
        marker = sides[other]
        absence = t - (s.seen_t if s.seen_t is not None else t)
        if absence <= cfg.t_flip_window_ms and dist(marker.center, s.pose) <= 2.0 * spec.diameter:
            if s.covered:
                put(i, ev.cover_end(t, mid))
            s.clock = s.due = None
            s.cand = s.covered = False
            s.side = other
            s.pose, s.rot, s.seen_t = marker.center, marker.rotation_deg, t
            tables.resets[mid].add(i)
            tables.obs_at[mid][i] = marker
            put(i, ev.flip(t, mid, other))
            return
        if s.due is not None:
            _sweep_drop(tables, st, s, mid, i, put)
            s.run_start, s.run_side, s.run_seen = t, other, t
            s.pose, s.rot, s.seen_t = marker.center, marker.rotation_deg, t
        return

    if s.topped_by:
        return
    if s.on_base:
        if s.clock is None:
            s.clock = s.seen_t
        if t - s.clock >= cfg.t_detach_ms:
            base = st[s.on_base]
            put(i, ev.unstack(t, mid, s.on_base))
            if base.topped_by == mid:
                base.topped_by = ""
                base.clock = t
                base.cand = False
            _sweep_off(s)
        return

    near = s.pose is not None and _hand_near(frame, s.pose, cfg.r_contact * spec.diameter)
    if s.clock is None:
        s.clock = s.seen_t
        s.cand = near
    if s.covered:
        if not near:
            put(i, ev.cover_end(t, mid))
            s.covered = s.cand = False
            s.clock = t
        return
    if s.cand:
        if near:
            if t - s.seen_t >= cfg.t_cover_min_ms:
                put(i, ev.cover_begin(t, mid))
                s.covered = True
        else:
            s.cand = False
            s.clock = t
        return
    if s.due is None and t - s.clock >= cfg.t_detach_ms:
        s.due = t
    if s.due is not None and t - s.seen_t > cfg.t_flip_window_ms:
        _sweep_drop(tables, st, s, mid, i, put)


def _sweep_drop(tables, st, s, mid, i, put) -> None:
    put(i, ev.detach(s.due, mid, s.pose))
    if s.topped_by and st[s.topped_by].on_base == mid:
        st[s.topped_by].on_base = ""
    _sweep_off(s)


def _sweep_off(s: _SweepState) -> None:
    s.on = False
    s.side = ""
    s.run_start, s.run_side, s.run_seen = None, "", None
    s.clock = s.due = None
    s.cand = s.covered = False
    s.on_base = ""
    s.topped_by = ""


def _spans(on: list[bool]) -> list[tuple[int, int]]:
    """Maximal [start, end) runs of True."""
    spans = []
    start = None
    for i, flag in enumerate(on):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(on)))
    return spans


def _motion_pass(tables: _Tables, cfg, magnets) -> None:
    """Slide and rotation episodes from the observation tables.

    Observations are grouped into segments bounded by motion resets (attach
    confirms, flips, slide-off unstacks); episodes never cross a segment.
    A rotation episode still open when the final segment of a stream-surviving
    span ends is recorded for the finalize pass; episodes cut short by a reset
    or a drop vanish silently, like the incremental tracker's.
    """
    tables.rot_survivor = {}
    n = len(tables.times)
    for mid in sorted(magnets):
        obs = tables.obs_at[mid]
        resets = tables.resets[mid]
        for a, b in _spans(tables.on_at[mid]):
            points = [i for i in range(a, b) if obs[i] is not None]
            segments: list[list[int]] = []
            for i in points:
                if i in resets or not segments:
                    segments.append([i])
                else:
                    segments[-1].append(i)
            for seg_idx, seg in enumerate(segments):
                open_acc = _motion_segment(tables, cfg, mid, seg)
                if open_acc is not None and b == n and seg_idx == len(segments) - 1:
                    tables.rot_survivor[mid] = open_acc


def _motion_segment(tables: _Tables, cfg, mid, seg: list[int]) -> float | None:
    """Returns the accumulator of a still-open rotation episode, if any."""
    if len(seg) < 2:
        return None
    times = tables.times
    obs = tables.obs_at[mid]
    anchor = obs[seg[0]].center
    slide_open = False
    slide_from = None
    last_move_t: int | None = None
    rot_open = False
    rot_acc = 0.0
    rot_had_rev = False
    rot_last_move: int | None = None
    for prev_i, i in zip(seg, seg[1:]):
        t, prev_t = times[i], times[prev_i]
        dt_s = (t - prev_t) / 1000.0
        cur, prev = obs[i], obs[prev_i]

        if dist(cur.center, prev.center) / dt_s >= cfg.v_rest:
            last_move_t = t
        if not slide_open and dist(cur.center, anchor) >= cfg.eps_move:
            slide_open = True
            slide_from = anchor
            last_move_t = t
        if slide_open and last_move_t is not None and t - last_move_t >= cfg.t_spin_gap_ms:
            tables.events.append((i, ev.slide_end(t, mid, slide_from, cur.center)))
            slide_open = False
            anchor = cur.center

        delta = shortest_angle_delta(prev.rotation_deg, cur.rotation_deg)
        if abs(delta) / dt_s >= cfg.omega_rest_deg_s:
            if not rot_open:
                rot_open, rot_acc, rot_had_rev = True, 0.0, False
            rot_last_move = t
        if rot_open:
            rot_acc += delta
            if abs(rot_acc) >= cfg.theta_full_deg:
                tables.events.append(
                    (i, ev.full_revolution(t, mid, "cw" if rot_acc > 0 else "ccw"))
                )
                rot_acc, rot_had_rev = 0.0, True
            if rot_last_move is not None and t - rot_last_move >= cfg.t_spin_gap_ms:
                if not rot_had_rev and abs(rot_acc) > 1e-9:
                    tables.events.append((i, ev.rotate_delta(t, mid, rot_acc)))
                rot_open, rot_acc, rot_had_rev = False, 0.0, False
    if rot_open and not rot_had_rev and abs(rot_acc) > 1e-9:
        return rot_acc
    return None


def _touch_and_dwell_pass(tables: _Tables, cfg, magnets, frames, t_end_ms) -> None:
    times = tables.times
    n = len(times)
    for mid in sorted(magnets):
        radius = cfg.r_contact * magnets[mid].diameter
        for a, b in _spans(tables.on_at[mid]):
            contact_start: int | None = None
            hold_open = False
            dwell_start: int | None = None
            dwell_fired = False
            for i in range(a, b):
                pose = tables.pose_at[mid][i]
                t = times[i]
                contact_now = pose is not None and _hand_near(frames[i], pose, radius, contact=True)
                hover_now = pose is not None and _hand_near(frames[i], pose, radius, contact=False)
                if contact_now:
                    if contact_start is None:
                        contact_start = t
                    if not hold_open and t - contact_start >= cfg.t_hold_min_ms:
                        hold_open = True
                        tables.events.append((i, ev.hold_begin(t, mid)))
                elif contact_start is not None:
                    duration = t - contact_start
                    if hold_open:
                        tables.events.append((i, ev.hold_end(t, mid, duration)))
                    elif duration <= cfg.t_tap_max_ms:
                        tables.events.append((i, ev.tap(t, mid)))
                    contact_start, hold_open = None, False
                dwelling = hover_now and not contact_now and tables.obs_at[mid][i] is not None
                if dwelling:
                    if dwell_start is None:
                        dwell_start, dwell_fired = t, False
                    if not dwell_fired and t - dwell_start >= cfg.t_point_dwell_ms:
                        dwell_fired = True
                        tables.events.append((i, ev.point_dwell(t, mid)))
                else:
                    dwell_start, dwell_fired = None, False
            if contact_start is not None:
                if b < n:
                    # span ended by a drop during frame b
                    if hold_open:
                        tables.events.append((b, ev.hold_end(times[b], mid, times[b] - contact_start)))
                else:
                    duration = t_end_ms - contact_start
                    if hold_open:
                        tables.events.append((_END_RANKED, ev.hold_end(t_end_ms, mid, duration)))
                    elif duration <= cfg.t_tap_max_ms:
                        tables.events.append((_END_RANKED, ev.tap(t_end_ms, mid)))


def _proximity_pass(tables: _Tables, cfg, magnets) -> None:
    carriers = sorted(m for m in magnets if magnets[m].role == "node-carrier")
    times = tables.times
    latch: set[tuple[str, str]] = set()
    for i in range(len(times)):
        for ai, a in enumerate(carriers):
            for b in carriers[ai + 1 :]:
                pair = (a, b)
                if not (tables.on_at[a][i] and tables.on_at[b][i]):
                    latch.discard(pair)
                    continue
                pa, pb = tables.pose_at[a][i], tables.pose_at[b][i]
                diameter = max(magnets[a].diameter, magnets[b].diameter)
                d = dist(pa, pb)
                if pair not in latch and d < cfg.d_near * diameter:
                    latch.add(pair)
                    tables.events.append((i, ev.bring_closer(times[i], a, b)))
                elif pair in latch and d > cfg.d_near_release * diameter:
                    latch.discard(pair)
                    tables.events.append((i, ev.moved_apart(times[i], a, b)))


def _finalize_pass(tables: _Tables, cfg, magnets, t_end_ms: int) -> None:
    for mid in sorted(magnets):
        s = tables.survivors.get(mid)
        if s is None or not s.on:
            continue
        acc = tables.rot_survivor.get(mid)
        if acc is not None:
            tables.events.append((_END_RANKED, ev.rotate_delta(t_end_ms, mid, acc)))
        if s.topped_by:
            continue
        if s.on_base:
            clock = s.clock if s.clock is not None else s.seen_t
            if s.seen_t is not None and s.seen_t < t_end_ms and clock is not None:
                if t_end_ms - clock >= cfg.t_detach_ms:
                    tables.events.append((_END_RANKED, ev.unstack(t_end_ms, mid, s.on_base)))
            continue
        if s.covered or s.cand:
            continue
        if s.due is not None:
            tables.events.append((_END_RANKED, ev.detach(s.due, mid, s.pose)))
        elif s.seen_t is not None and s.seen_t < t_end_ms:
            clock = s.clock if s.clock is not None else s.seen_t
            if t_end_ms - clock >= cfg.t_detach_ms:
                tables.events.append((_END_RANKED, ev.detach(t_end_ms, mid, s.pose)))
