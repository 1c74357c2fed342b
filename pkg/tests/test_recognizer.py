import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netboard.errors import RangeError, TimestampError
from netboard.frames import ObservationFrame
from netboard.recognizer import (
    RecognizerConfig,
    RecognizerState,
    finalize,
    ingest_frame,
    recognize_stream,
    unwrap_rotation,
)
from netboard.scripting import GestureScript, ScriptStep, script_scenario

CFG = RecognizerConfig()


def expand(steps, roster, duration=0, rate=60.0):
    script = GestureScript(rate_hz=rate, steps=tuple(steps), duration_ms=duration)
    return script_scenario(script, roster)


def kinds(events):
    return [(e.kind, e.magnets()) for e in events]


# unwrap_rotation


def test_unwrap_identity():
    assert unwrap_rotation(10.0, 10.0) == 0.0


def test_unwrap_wraps_forward():
    assert unwrap_rotation(350.0, 5.0) == pytest.approx(15.0)


def test_unwrap_wraps_backward():
    assert unwrap_rotation(5.0, 350.0) == pytest.approx(-15.0)


def test_unwrap_rejects_out_of_range():
    with pytest.raises(RangeError):
        unwrap_rotation(-1.0, 10.0)
    with pytest.raises(RangeError):
        unwrap_rotation(0.0, 360.0)


@given(
    st.floats(min_value=0, max_value=359.999),
    st.floats(min_value=0, max_value=359.999),
)
@settings(max_examples=300, deadline=None)
def test_unwrap_matches_argmin_oracle(prev, curr):
    # oracle: the k in {-1, 0, 1} minimizing |curr - prev + 360k|
    candidates = [curr - prev + 360.0 * k for k in (-1, 0, 1)]
    best = min(candidates, key=abs)
    delta = unwrap_rotation(prev, curr)
    assert delta == pytest.approx(best, abs=1e-9)
    assert -180.0 < delta <= 180.0


# config invariants


def test_config_rejects_inverted_hysteresis():
    with pytest.raises(RangeError):
        RecognizerConfig(d_near=3.0, d_near_release=2.0)


def test_config_rejects_tap_longer_than_hold():
    with pytest.raises(RangeError):
        RecognizerConfig(t_tap_max_ms=700, t_hold_min_ms=600)


def test_config_rejects_nonpositive_times():
    with pytest.raises(RangeError):
        RecognizerConfig(t_detach_ms=0)


# attach / detach


def test_empty_frame_no_events(roster):
    state = RecognizerState.for_roster(roster)
    state, events = ingest_frame(state, ObservationFrame(t_ms=0), CFG)
    assert events == []


def test_non_monotone_frame_rejected(roster):
    state = RecognizerState.for_roster(roster)
    state, _ = ingest_frame(state, ObservationFrame(t_ms=10), CFG)
    with pytest.raises(TimestampError):
        ingest_frame(state, ObservationFrame(t_ms=10), CFG)


def test_attach_at_confirmation_threshold(roster):
    frames = expand(
        [ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0)],
        roster, duration=200,
    )
    events = recognize_stream(frames, CFG, roster)
    attaches = [e for e in events if e.kind == "attach"]
    assert len(attaches) == 1
    # first frame where the visibility run is at least t_confirm old
    assert attaches[0].t_ms == 100
    assert attaches[0].xy == (0.5, 0.5)


def test_short_occlusion_is_invisible(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="occlude", magnet="m1", t0=1000, t1=1300),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",))]


def test_detach_after_grace(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="remove", magnet="m1", t=1000),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("detach", ("m1",))]
    detach = events[-1]
    # stamped when absence reached t_detach, relative to the last sighting
    assert detach.t_ms == pytest.approx(983 + CFG.t_detach_ms, abs=20)
    assert detach.xy == (0.5, 0.5)


def test_reattach_cycle(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="remove", magnet="m1", t=1000),
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.3, 0.3), t=4000),
    ]
    events = recognize_stream(expand(steps, roster, duration=6000), CFG, roster)
    assert kinds(events) == [
        ("attach", ("m1",)),
        ("detach", ("m1",)),
        ("attach", ("m1",)),
    ]


# tap / hold


def test_tap_within_limit(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="touch", magnet="m1", t0=1000, t1=1150),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("tap", ("m1",))]


def test_long_touch_is_hold(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="touch", magnet="m1", t0=1000, t1=1900),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [
        ("attach", ("m1",)),
        ("hold_begin", ("m1",)),
        ("hold_end", ("m1",)),
    ]
    begin = events[1]
    end = events[2]
    assert begin.t_ms == 1600  # contact run reaches t_hold_min
    assert end.duration_ms == 900
    assert end.t_ms == 1900


def test_mid_duration_touch_is_nothing(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="touch", magnet="m1", t0=1000, t1=1450),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",))]


# rotation


def test_full_revolution_without_delta(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="spin", magnet="m1", delta_deg=360.0, t0=1000, t1=3000),
    ]
    events = recognize_stream(expand(steps, roster, duration=5000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("full_revolution", ("m1",))]
    assert events[1].direction == "cw"


def test_counterclockwise_revolution(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="spin", magnet="m1", delta_deg=-360.0, t0=1000, t1=3000),
    ]
    events = recognize_stream(expand(steps, roster, duration=5000), CFG, roster)
    assert events[1].kind == "full_revolution"
    assert events[1].direction == "ccw"


def test_partial_rotation_emits_delta(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="spin", magnet="m1", delta_deg=90.0, t0=1000, t1=1600),
    ]
    events = recognize_stream(expand(steps, roster, duration=4000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("rotate_delta", ("m1",))]
    assert events[1].degrees == pytest.approx(90.0, abs=2.0)
    # emitted when the still gap completes
    assert events[1].t_ms >= 1600 + CFG.t_spin_gap_ms


# slide


def test_slide_end_carries_endpoints(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.2, 0.2), t=0),
        ScriptStep(op="glide", magnet="m1", from_xy=(0.2, 0.2), to_xy=(0.7, 0.2),
                   t0=1000, t1=2000),
    ]
    events = recognize_stream(expand(steps, roster, duration=4000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("slide_end", ("m1",))]
    slide = events[1]
    assert slide.from_xy == (0.2, 0.2)
    assert slide.to_xy == (0.7, 0.2)


def test_sub_threshold_drift_is_silent(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="glide", magnet="m1", from_xy=(0.5, 0.5), to_xy=(0.504, 0.5),
                   t0=1000, t1=1200),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",))]


# flip


def test_flip_suppresses_detach_attach(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="flip", magnet="m1", t=1000),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("flip", ("m1",))]
    assert events[1].new_side == "b"


def test_double_flip_returns_to_side_a(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="flip", magnet="m1", t=1000),
        ScriptStep(op="flip", magnet="m1", t=2500),
    ]
    events = recognize_stream(expand(steps, roster, duration=4000), CFG, roster)
    assert [e.new_side for e in events if e.kind == "flip"] == ["b", "a"]


# cover


def test_cover_begin_end(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="hover", magnet="m1", t0=900, t1=2600),
        ScriptStep(op="occlude", magnet="m1", t0=1000, t1=2500),
    ]
    events = recognize_stream(expand(steps, roster, duration=4000), CFG, roster)
    assert kinds(events) == [
        ("attach", ("m1",)),
        ("cover_begin", ("m1",)),
        ("cover_end", ("m1",)),
    ]
    begin, end = events[1], events[2]
    assert begin.t_ms == pytest.approx(983 + CFG.t_cover_min_ms, abs=20)
    assert end.t_ms == pytest.approx(2500, abs=20)


def test_cover_without_hand_is_detach(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="occlude", magnet="m1", t0=1000, t1=2500),
    ]
    events = recognize_stream(expand(steps, roster, duration=4000), CFG, roster)
    assert kinds(events) == [
        ("attach", ("m1",)),
        ("detach", ("m1",)),
        ("attach", ("m1",)),
    ]


# point dwell


def test_point_dwell(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="hover", magnet="m1", t0=1000, t1=2100),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",)), ("point_dwell", ("m1",))]
    assert events[1].t_ms == 1800


def test_short_hover_no_dwell(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="hover", magnet="m1", t0=1000, t1=1500),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert kinds(events) == [("attach", ("m1",))]


# proximity


def test_bring_closer_and_apart(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.3, 0.5), t=0),
        ScriptStep(op="place", magnet="m2", side="a", xy=(0.6, 0.5), t=0),
        ScriptStep(op="glide", magnet="m2", from_xy=(0.6, 0.5), to_xy=(0.35, 0.5),
                   t0=1000, t1=2000),
        ScriptStep(op="glide", magnet="m2", from_xy=(0.35, 0.5), to_xy=(0.6, 0.5),
                   t0=3000, t1=4000),
    ]
    events = recognize_stream(expand(steps, roster, duration=5500), CFG, roster)
    sigs = kinds(events)
    assert ("bring_closer", ("m1", "m2")) in sigs
    assert ("moved_apart", ("m1", "m2")) in sigs
    assert sigs.index(("bring_closer", ("m1", "m2"))) < sigs.index(("moved_apart", ("m1", "m2")))


def test_proximity_latch_no_repeat(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.3, 0.5), t=0),
        ScriptStep(op="place", magnet="m2", side="a", xy=(0.33, 0.5), t=0),
    ]
    events = recognize_stream(expand(steps, roster, duration=4000), CFG, roster)
    assert sum(1 for e in events if e.kind == "bring_closer") == 1


# stack


def test_stack_and_unstack(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="place", magnet="w1", side="a", xy=(0.5, 0.5), t=1500),
        ScriptStep(op="remove", magnet="w1", t=4000),
    ]
    events = recognize_stream(expand(steps, roster, duration=6000), CFG, roster)
    sigs = kinds(events)
    assert ("stack", ("w1", "m1")) in sigs
    assert ("unstack", ("w1", "m1")) in sigs
    # the widget never plain-attaches or detaches
    assert ("attach", ("w1",)) not in sigs
    assert ("detach", ("w1",)) not in sigs


def test_stack_protects_base_from_detach(roster):
    # widget on top occludes the base marker for seconds; no base detach
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="place", magnet="w1", side="a", xy=(0.5, 0.5), t=1500),
        ScriptStep(op="occlude", magnet="m1", t0=1600, t1=6000),
        ScriptStep(op="remove", magnet="w1", t=6200),
    ]
    events = recognize_stream(expand(steps, roster, duration=9000), CFG, roster)
    sigs = kinds(events)
    assert ("detach", ("m1",)) not in sigs
    assert ("stack", ("w1", "m1")) in sigs


def test_carrier_on_carrier_never_stacks(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="place", magnet="m2", side="a", xy=(0.5, 0.5), t=1500),
    ]
    events = recognize_stream(expand(steps, roster, duration=3000), CFG, roster)
    assert not [e for e in events if e.kind == "stack"]


# finalize


def test_finalize_fresh_state_empty(roster):
    state = RecognizerState.for_roster(roster)
    assert finalize(state, 1000, CFG) == []


def test_finalize_flushes_open_hold(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="touch", magnet="m1", t0=1000, t1=2000),
    ]
    frames = [f for f in expand(steps, roster) if f.t_ms < 1700]  # ends mid-hold
    state = RecognizerState.for_roster(roster)
    events = []
    for frame in frames:
        state, batch = ingest_frame(state, frame, CFG)
        events.extend(batch)
    tail = finalize(state, 1700, CFG)
    assert [e.kind for e in tail] == ["hold_end"]
    assert tail[0].duration_ms == 700


def test_finalize_flushes_open_rotation(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="spin", magnet="m1", delta_deg=90.0, t0=1000, t1=1500),
    ]
    frames = expand(steps, roster, duration=1500)  # ends before the rest gap
    state = RecognizerState.for_roster(roster)
    for frame in frames:
        state, _ = ingest_frame(state, frame, CFG)
    tail = finalize(state, 1500, CFG)
    assert [e.kind for e in tail] == ["rotate_delta"]
    assert tail[0].degrees == pytest.approx(90.0, abs=5.0)


def test_finalize_flushes_unresolved_absence(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="remove", magnet="m1", t=1000),
    ]
    frames = expand(steps, roster, duration=1600)  # absence 600ms, not yet emitted
    state = RecognizerState.for_roster(roster)
    events = []
    for frame in frames:
        state, batch = ingest_frame(state, frame, CFG)
        events.extend(batch)
    assert [e.kind for e in events] == ["attach"]
    tail = finalize(state, 1600, CFG)
    assert [e.kind for e in tail] == ["detach"]
