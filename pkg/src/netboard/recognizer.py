"""Temporal state machine turning observation frames into discrete actions.

Threshold semantics (shared verbatim by the batch oracle in
``batch_oracle.py`` — keep the two in sync when editing):

* attach: a side's fiducial visible on a run that started either initially or
  after the magnet detached, confirmed once the run is ``t_confirm_ms`` old.
  Gaps shorter than ``t_detach_ms`` do not break a run.
* detach: absence of an attached magnet reaches ``t_detach_ms`` on the detach
  clock with no fingertip lingering near the last pose. The event timestamp is
  the frame where the clock crossed the threshold, but emission waits until a
  flip can be ruled out (absence beyond ``t_flip_window_ms`` or the magnet's
  own side reappearing), because a flip suppresses the detach/attach pair.
* flip: the opposite side's fiducial appears within ``t_flip_window_ms`` of
  the current side's disappearance and within two diameters of the last pose.
* cover: a fingertip within ``r_contact`` diameters of the last pose at every
  absent frame since the absence began; cover_begin fires when the covered
  absence reaches ``t_cover_min_ms``, cover_end when the marker returns or the
  fingertip leaves (the latter restarts the detach clock).
* tap / hold: a contact fingertip within ``r_contact`` diameters of the
  magnet. Runs ending within ``t_tap_max_ms`` are taps; runs reaching
  ``t_hold_min_ms`` begin a hold that ends on release with the full duration.
* point dwell: a non-contact fingertip within ``r_contact`` diameters of a
  magnet whose marker is visible that frame, sustained for
  ``t_point_dwell_ms`` with no contact anywhere in the dwell; fires once per
  approach. Visibility distinguishes pointing (beside a visible magnet) from
  covering (obscuring it).
* slide: displacement from the rest anchor reaching ``eps_move`` opens an
  episode; the episode ends once no observed movement at ``v_rest`` or above
  happened for ``t_spin_gap_ms``.
* rotate: angular speed at or above ``omega_rest_deg_s`` opens an episode;
  shortest-path deltas accumulate while it is open. Reaching
  ``theta_full_deg`` of accumulation immediately emits a full revolution and
  cancels the episode's pending rotate_delta; otherwise the accumulated delta
  is emitted when the episode has been still for ``t_spin_gap_ms``.
* stack: a widget magnet whose appearance confirms within ``r_stack``
  diameters of an attached node-carrier stacks onto it (instead of attaching)
  and suspends the base's absence processing; the widget vanishing for
  ``t_detach_ms`` unstacks and drops it, while sliding out of ``r_stack``
  unstacks it into an independent attach (unstack then attach, same frame).
* proximity: attached node-carrier pairs latch bring_closer when their
  distance falls below ``d_near`` diameters and release moved_apart above
  ``d_near_release`` diameters; detaching silently drops the latch.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import events as ev
from .errors import RangeError, TimestampError
from .events import UserActionEvent
from .frames import ObservationFrame
from .geometry import dist, shortest_angle_delta
from .story import MagnetSpec


@dataclass(frozen=True)
class RecognizerConfig:
    """Thresholds for the action recognizer.

    Times are integer milliseconds; ``eps_move`` and ``v_rest`` are normalized
    board widths (per second for ``v_rest``); ``d_near``, ``d_near_release``,
    ``r_contact``, and ``r_stack`` are multiples of the magnet diameter.
    """

    t_confirm_ms: int = 100
    t_detach_ms: int = 500
    t_tap_max_ms: int = 300
    t_hold_min_ms: int = 600
    t_point_dwell_ms: int = 800
    t_cover_min_ms: int = 600
    eps_move: float = 0.01
    v_rest: float = 0.02
    d_near: float = 2.0
    d_near_release: float = 3.0
    r_contact: float = 0.75
    theta_full_deg: float = 330.0
    t_spin_gap_ms: int = 400
    r_stack: float = 0.75
    t_flip_window_ms: int = 1000
    omega_rest_deg_s: float = 15.0

    def __post_init__(self):
        for name in (
            "t_confirm_ms", "t_detach_ms", "t_tap_max_ms", "t_hold_min_ms",
            "t_point_dwell_ms", "t_cover_min_ms", "t_spin_gap_ms", "t_flip_window_ms",
        ):
            if getattr(self, name) <= 0:
                raise RangeError(f"{name} must be positive")
        if self.d_near_release <= self.d_near:
            raise RangeError("d_near_release must exceed d_near")
        if self.t_tap_max_ms >= self.t_hold_min_ms:
            raise RangeError("t_tap_max_ms must be below t_hold_min_ms")

    @staticmethod
    def from_dict(data: dict) -> "RecognizerConfig":
        return RecognizerConfig(**data)

    def with_overrides(self, **overrides) -> "RecognizerConfig":
        return replace(self, **overrides)


def unwrap_rotation(prev_deg: float, curr_deg: float) -> float:
    """Signed angular step, the unique delta in (-180, 180]."""
    if not (0.0 <= prev_deg < 360.0) or not (0.0 <= curr_deg < 360.0):
        raise RangeError(f"angles must lie in [0, 360), got {prev_deg}, {curr_deg}")
    return shortest_angle_delta(prev_deg, curr_deg)


@dataclass
class _Track:
    """Mutable per-magnet recognizer state."""

    magnet: MagnetSpec
    attached: bool = False
    side: str = ""
    pose: tuple[float, float] | None = None
    rot: float | None = None
    last_seen_t: int | None = None
    # pending visibility run (pre-attach)
    run_start_t: int | None = None
    run_side: str = ""
    run_last_seen_t: int | None = None
    # absence bookkeeping
    detach_clock: int | None = None
    detach_due: int | None = None
    cover_candidate: bool = False
    covered: bool = False
    # stacking
    stacked_on: str = ""  # set on widget tops
    stacked_by: str = ""  # set on bases
    # slide episode
    rest_anchor: tuple[float, float] | None = None
    slide_open: bool = False
    slide_from: tuple[float, float] | None = None
    last_move_t: int | None = None
    prev_obs_t: int | None = None
    # rotation episode
    rot_open: bool = False
    rot_acc: float = 0.0
    rot_had_rev: bool = False
    rot_last_move_t: int | None = None
    # contact / dwell
    contact_start: int | None = None
    hold_open: bool = False
    dwell_start: int | None = None
    dwell_fired: bool = False

    def reset_motion(self) -> None:
        self.rest_anchor = self.pose
        self.slide_open = False
        self.slide_from = None
        self.last_move_t = None
        self.prev_obs_t = None
        self.rot_open = False
        self.rot_acc = 0.0
        self.rot_had_rev = False
        self.rot_last_move_t = None

    def reset_absence(self) -> None:
        self.detach_clock = None
        self.detach_due = None
        self.cover_candidate = False
        self.covered = False

    def drop(self) -> None:
        """Full reset after a detach/unstack."""
        self.attached = False
        self.side = ""
        self.run_start_t = None
        self.run_side = ""
        self.run_last_seen_t = None
        self.stacked_on = ""
        self.reset_absence()
        self.reset_motion()
        self.contact_start = None
        self.hold_open = False
        self.dwell_start = None
        self.dwell_fired = False


@dataclass
class RecognizerState:
    """Whole-session recognizer state: one track per magnet plus pair latches."""

    roster: dict[str, MagnetSpec]
    tracks: dict[str, _Track] = field(default_factory=dict)
    near_latch: set[tuple[str, str]] = field(default_factory=set)
    last_t: int | None = None

    @staticmethod
    def for_roster(magnets: list[MagnetSpec] | dict[str, MagnetSpec]) -> "RecognizerState":
        roster = (
            {m.magnet_id: m for m in magnets} if not isinstance(magnets, dict) else dict(magnets)
        )
        return RecognizerState(roster=roster)

    def track(self, magnet_id: str) -> _Track:
        if magnet_id not in self.tracks:
            self.tracks[magnet_id] = _Track(magnet=self.roster[magnet_id])
        return self.tracks[magnet_id]


def _near_any_hand(frame: ObservationFrame, pose, radius: float, contact=None) -> bool:
    for hand in frame.hands:
        if contact is not None and hand.contact != contact:
            continue
        if dist(hand.fingertip, pose) <= radius:
            return True
    return False


def ingest_frame(
    state: RecognizerState, frame: ObservationFrame, cfg: RecognizerConfig
) -> tuple[RecognizerState, list[UserActionEvent]]:
    """Advance the recognizer by one frame; returns the emitted events."""
    t = frame.t_ms
    if state.last_t is not None and t <= state.last_t:
        raise TimestampError(f"frame t={t} not after t={state.last_t}")
    state.last_t = t

    out: list[UserActionEvent] = []

    # index visible sides per magnet
    seen: dict[str, dict[str, object]] = {}
    for marker in frame.markers:
        magnet = None
        for m in state.roster.values():
            side = m.marker_side(marker.fiducial_id)
            if side is not None:
                magnet = m
                seen.setdefault(m.magnet_id, {})[side] = marker
                break

    for magnet_id in sorted(state.roster):
        track = state.track(magnet_id)
        sides = seen.get(magnet_id, {})
        if track.attached:
            _step_attached(state, track, sides, frame, cfg, out)
        else:
            _step_pending(state, track, sides, frame, cfg, out)

    for magnet_id in sorted(state.roster):
        track = state.tracks.get(magnet_id)
        if track is not None and track.attached:
            _step_touch(track, frame, cfg, out)

    _step_proximity(state, t, cfg, out)

    out.sort(key=lambda e: e.sort_key())
    return state, out


def _pick_side(sides: dict[str, object], prefer: str) -> str:
    if prefer and prefer in sides:
        return prefer
    return "a" if "a" in sides else "b"


def _step_pending(state, track: _Track, sides, frame, cfg, out) -> None:
    t = frame.t_ms
    if not sides:
        if (
            track.run_start_t is not None
            and track.run_last_seen_t is not None
            and t - track.run_last_seen_t >= cfg.t_detach_ms
        ):
            track.run_start_t = None  # stale flash, forget the run
            track.run_side = ""
            track.run_last_seen_t = None
        return

    side = _pick_side(sides, track.run_side)
    marker = sides[side]
    if track.run_start_t is None or side != track.run_side:
        track.run_start_t = t
        track.run_side = side
    elif t - track.run_last_seen_t >= cfg.t_detach_ms:
        track.run_start_t = t  # gap too old to merge
    track.run_last_seen_t = t
    track.pose = marker.center
    track.rot = marker.rotation_deg
    track.last_seen_t = t

    if t - track.run_start_t >= cfg.t_confirm_ms:
        base = _stack_base(state, track, cfg)
        track.attached = True
        track.side = side
        track.run_start_t = None
        track.run_side = ""
        track.reset_absence()
        track.reset_motion()
        track.prev_obs_t = t
        if base is not None:
            track.stacked_on = base.magnet.magnet_id
            if base.covered:
                out.append(ev.cover_end(t, base.magnet.magnet_id))
            base.stacked_by = track.magnet.magnet_id
            base.reset_absence()
            out.append(ev.stack(t, track.magnet.magnet_id, base.magnet.magnet_id))
        else:
            out.append(ev.attach(t, track.magnet.magnet_id, track.pose))


def _stack_base(state: RecognizerState, top: _Track, cfg) -> _Track | None:
    """Nearest attached node-carrier within the stack radius, for widget tops."""
    if top.magnet.role != "widget":
        return None
    best: _Track | None = None
    best_d = None
    for magnet_id in sorted(state.roster):
        cand = state.tracks.get(magnet_id)
        if cand is None or cand is top or not cand.attached or cand.stacked_by:
            continue
        if cand.magnet.role != "node-carrier" or cand.pose is None:
            continue
        d = dist(top.pose, cand.pose)
        if d <= cfg.r_stack * cand.magnet.diameter and (best_d is None or d < best_d):
            best, best_d = cand, d
    return best


def _step_attached(state, track: _Track, sides, frame, cfg, out) -> None:
    t = frame.t_ms
    magnet_id = track.magnet.magnet_id

    if track.side in sides:
        marker = sides[track.side]
        if track.detach_due is not None:
            _emit_detach(state, track, frame.t_ms, out)
            # same-side reappearance starts a fresh pending run
            track.run_start_t = t
            track.run_side = track.side or _pick_side(sides, "")
            track.run_last_seen_t = t
            track.pose = marker.center
            track.rot = marker.rotation_deg
            track.last_seen_t = t
            return
        if track.covered:
            out.append(ev.cover_end(t, magnet_id))
        track.reset_absence()
        if track.stacked_on and dist(marker.center, _base_pose(state, track)) > cfg.r_stack * state.roster[track.stacked_on].diameter:
            # slid off the stack: the widget becomes independently attached
            # and its motion restarts from the slid-off pose
            _emit_unstack(state, track, t, out, still_visible=True)
            track.pose = marker.center
            track.rot = marker.rotation_deg
            track.last_seen_t = t
            track.reset_motion()
            track.prev_obs_t = t
            out.append(ev.attach(t, track.magnet.magnet_id, marker.center))
            return
        _step_motion(track, marker, t, cfg, out)
        track.pose = marker.center
        track.rot = marker.rotation_deg
        track.last_seen_t = t
        track.prev_obs_t = t
        return

    other = "b" if track.side == "a" else "a"
    if other in sides:
        marker = sides[other]
        absence = t - (track.last_seen_t if track.last_seen_t is not None else t)
        if absence <= cfg.t_flip_window_ms and dist(marker.center, track.pose) <= 2.0 * track.magnet.diameter:
            if track.covered:
                out.append(ev.cover_end(t, magnet_id))
            track.reset_absence()
            track.side = other
            track.pose = marker.center
            track.rot = marker.rotation_deg
            track.last_seen_t = t
            # a flip invalidates the running motion episodes; deltas resume
            # from the flip-frame pose
            track.reset_motion()
            track.prev_obs_t = t
            out.append(ev.flip(t, magnet_id, other))
            return
        if track.detach_due is not None:
            _emit_detach(state, track, t, out)
            track.run_start_t = t
            track.run_side = other
            track.run_last_seen_t = t
            track.pose = marker.center
            track.rot = marker.rotation_deg
            track.last_seen_t = t
        # absence below the detach threshold with a far-away flip side:
        # sensing glitch, ignored until the absence resolves
        return

    # absent
    if track.stacked_by:
        return  # base hidden by a stacked widget: absence is accounted for
    if track.stacked_on:
        if track.detach_clock is None:
            track.detach_clock = track.last_seen_t
        if t - track.detach_clock >= cfg.t_detach_ms:
            _emit_unstack(state, track, t, out, still_visible=False)
        return

    near = track.pose is not None and _near_any_hand(
        frame, track.pose, cfg.r_contact * track.magnet.diameter
    )
    if track.detach_clock is None:
        track.detach_clock = track.last_seen_t
        track.cover_candidate = near
    if track.covered:
        if not near:
            out.append(ev.cover_end(t, magnet_id))
            track.covered = False
            track.cover_candidate = False
            track.detach_clock = t
        return
    if track.cover_candidate:
        if near:
            if t - track.last_seen_t >= cfg.t_cover_min_ms:
                out.append(ev.cover_begin(t, magnet_id))
                track.covered = True
        else:
            track.cover_candidate = False
            track.detach_clock = t
        return
    if track.detach_due is None and t - track.detach_clock >= cfg.t_detach_ms:
        track.detach_due = t
    if track.detach_due is not None and t - track.last_seen_t > cfg.t_flip_window_ms:
        _emit_detach(state, track, t, out)


def _base_pose(state: RecognizerState, top: _Track):
    base = state.tracks.get(top.stacked_on)
    return base.pose if base is not None and base.pose is not None else top.pose


def _close_contact(track: _Track, t: int, out) -> None:
    """Force-close an open contact run when a track is dropped."""
    if track.contact_start is not None and track.hold_open:
        out.append(ev.hold_end(t, track.magnet.magnet_id, t - track.contact_start))
    track.contact_start = None
    track.hold_open = False


def _emit_detach(state: RecognizerState, track: _Track, t: int, out) -> None:
    _close_contact(track, t, out)
    out.append(ev.detach(track.detach_due, track.magnet.magnet_id, track.pose))
    _drop_latches(state, track.magnet.magnet_id)
    if track.stacked_by:
        base_top = state.tracks.get(track.stacked_by)
        if base_top is not None:
            base_top.stacked_on = ""
    track.drop()


def _emit_unstack(
    state: RecognizerState, track: _Track, t: int, out, still_visible: bool
) -> None:
    base = state.tracks.get(track.stacked_on)
    out.append(ev.unstack(t, track.magnet.magnet_id, track.stacked_on))
    if base is not None and base.stacked_by == track.magnet.magnet_id:
        base.stacked_by = ""
        base.detach_clock = t
        base.cover_candidate = False
    _drop_latches(state, track.magnet.magnet_id)
    if still_visible:
        # slid off the stack: the widget stays attached on its own; the
        # caller restarts its motion state from the slid-off pose
        track.stacked_on = ""
        track.reset_absence()
    else:
        _close_contact(track, t, out)
        track.drop()


def _drop_latches(state: RecognizerState, magnet_id: str) -> None:
    state.near_latch = {pair for pair in state.near_latch if magnet_id not in pair}


def _step_motion(track: _Track, marker, t: int, cfg, out) -> None:
    """Slide and rotation episodes, fed by consecutive visible observations."""
    if track.prev_obs_t is None or track.pose is None or t == track.prev_obs_t:
        return
    dt_s = (t - track.prev_obs_t) / 1000.0
    magnet_id = track.magnet.magnet_id

    speed = dist(marker.center, track.pose) / dt_s
    if speed >= cfg.v_rest:
        track.last_move_t = t
    if not track.slide_open and track.rest_anchor is not None:
        if dist(marker.center, track.rest_anchor) >= cfg.eps_move:
            track.slide_open = True
            track.slide_from = track.rest_anchor
            track.last_move_t = t
    if track.slide_open and track.last_move_t is not None and t - track.last_move_t >= cfg.t_spin_gap_ms:
        out.append(ev.slide_end(t, magnet_id, track.slide_from, marker.center))
        track.slide_open = False
        track.slide_from = None
        track.rest_anchor = marker.center

    delta = shortest_angle_delta(track.rot, marker.rotation_deg)
    omega = abs(delta) / dt_s
    if omega >= cfg.omega_rest_deg_s:
        if not track.rot_open:
            track.rot_open = True
            track.rot_acc = 0.0
            track.rot_had_rev = False
        track.rot_last_move_t = t
    if track.rot_open:
        track.rot_acc += delta
        if abs(track.rot_acc) >= cfg.theta_full_deg:
            out.append(ev.full_revolution(t, magnet_id, "cw" if track.rot_acc > 0 else "ccw"))
            track.rot_acc = 0.0
            track.rot_had_rev = True
        if track.rot_last_move_t is not None and t - track.rot_last_move_t >= cfg.t_spin_gap_ms:
            if not track.rot_had_rev and abs(track.rot_acc) > 1e-9:
                out.append(ev.rotate_delta(t, magnet_id, track.rot_acc))
            track.rot_open = False
            track.rot_acc = 0.0
            track.rot_had_rev = False


def _step_touch(track: _Track, frame, cfg, out) -> None:
    """Tap, hold, and point-dwell machinery for one attached magnet."""
    t = frame.t_ms
    magnet_id = track.magnet.magnet_id
    if track.pose is None:
        return
    radius = cfg.r_contact * track.magnet.diameter
    contact_now = _near_any_hand(frame, track.pose, radius, contact=True)
    hover_now = _near_any_hand(frame, track.pose, radius, contact=False)

    if contact_now:
        if track.contact_start is None:
            track.contact_start = t
        if not track.hold_open and t - track.contact_start >= cfg.t_hold_min_ms:
            track.hold_open = True
            out.append(ev.hold_begin(t, magnet_id))
    elif track.contact_start is not None:
        duration = t - track.contact_start
        if track.hold_open:
            out.append(ev.hold_end(t, magnet_id, duration))
        elif duration <= cfg.t_tap_max_ms:
            out.append(ev.tap(t, magnet_id))
        track.contact_start = None
        track.hold_open = False

    dwelling = hover_now and not contact_now and track.last_seen_t == t
    if dwelling:
        if track.dwell_start is None:
            track.dwell_start = t
            track.dwell_fired = False
        if not track.dwell_fired and t - track.dwell_start >= cfg.t_point_dwell_ms:
            track.dwell_fired = True
            out.append(ev.point_dwell(t, magnet_id))
    else:
        track.dwell_start = None
        track.dwell_fired = False


def _step_proximity(state: RecognizerState, t: int, cfg, out) -> None:
    carriers = [
        track
        for magnet_id, track in sorted(state.tracks.items())
        if track.attached and track.magnet.role == "node-carrier" and track.pose is not None
    ]
    for i, a in enumerate(carriers):
        for b in carriers[i + 1 :]:
            pair = (a.magnet.magnet_id, b.magnet.magnet_id)
            diameter = max(a.magnet.diameter, b.magnet.diameter)
            d = dist(a.pose, b.pose)
            if pair not in state.near_latch and d < cfg.d_near * diameter:
                state.near_latch.add(pair)
                out.append(ev.bring_closer(t, *pair))
            elif pair in state.near_latch and d > cfg.d_near_release * diameter:
                state.near_latch.discard(pair)
                out.append(ev.moved_apart(t, *pair))


def finalize(
    state: RecognizerState, t_end_ms: int, cfg: RecognizerConfig
) -> list[UserActionEvent]:
    """Flush open holds, open rotation episodes, and unresolved absences."""
    if state.last_t is not None and t_end_ms < state.last_t:
        raise TimestampError(f"t_end={t_end_ms} before last frame t={state.last_t}")
    out: list[UserActionEvent] = []
    for magnet_id in sorted(state.tracks):
        track = state.tracks[magnet_id]
        if not track.attached:
            continue
        if track.contact_start is not None:
            duration = t_end_ms - track.contact_start
            if track.hold_open:
                out.append(ev.hold_end(t_end_ms, magnet_id, duration))
            elif duration <= cfg.t_tap_max_ms:
                out.append(ev.tap(t_end_ms, magnet_id))
            track.contact_start = None
            track.hold_open = False
        if track.rot_open and not track.rot_had_rev and abs(track.rot_acc) > 1e-9:
            out.append(ev.rotate_delta(t_end_ms, magnet_id, track.rot_acc))
        track.rot_open = False
        if track.stacked_by:
            continue
        if track.stacked_on:
            clock = track.detach_clock if track.detach_clock is not None else track.last_seen_t
            if track.last_seen_t is not None and track.last_seen_t < t_end_ms and clock is not None:
                if t_end_ms - clock >= cfg.t_detach_ms:
                    _emit_unstack(state, track, t_end_ms, out, still_visible=False)
            continue
        if track.covered or track.cover_candidate:
            continue
        if track.detach_due is not None:
            _emit_detach(state, track, t_end_ms, out)
        elif track.last_seen_t is not None and track.last_seen_t < t_end_ms:
            clock = track.detach_clock if track.detach_clock is not None else track.last_seen_t
            if t_end_ms - clock >= cfg.t_detach_ms:
                track.detach_due = t_end_ms
                _emit_detach(state, track, t_end_ms, out)
    out.sort(key=lambda e: e.sort_key())
    return out


def recognize_stream(
    frames: list[ObservationFrame],
    cfg: RecognizerConfig,
    roster: list[MagnetSpec] | dict[str, MagnetSpec],
    t_end_ms: int | None = None,
) -> list[UserActionEvent]:
    """Fold ingest_frame over a stream and finalize; the incremental pipeline."""
    state = RecognizerState.for_roster(roster)
    out: list[UserActionEvent] = []
    for frame in frames:
        state, batch = ingest_frame(state, frame, cfg)
        out.extend(batch)
    if t_end_ms is None:
        t_end_ms = frames[-1].t_ms if frames else 0
    out.extend(finalize(state, t_end_ms, cfg))
    return out
