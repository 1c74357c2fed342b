import pytest

from netboard.errors import ReferentialError, ScriptConflict
from netboard.frames import serialize_stream
from netboard.scripting import (
    GestureScript,
    ScriptStep,
    parse_script,
    script_scenario,
    serialize_script,
    validate_script,
)


def expand(steps, roster, rate=60.0, duration=0):
    script = GestureScript(rate_hz=rate, steps=tuple(steps), duration_ms=duration)
    return script_scenario(script, roster)


def test_empty_script_empty_stream(roster):
    assert expand([], roster) == []
    assert expand([], roster, rate=17.3) == []


def test_touch_sample_count(roster):
    # contact in exactly the samples with 1000 <= t < 1150 at 60 Hz: floor(150 / 16.67) = 9
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="touch", magnet="m1", t0=1000, t1=1150),
    ]
    frames = expand(steps, roster)
    contact_frames = [f for f in frames if f.hands and f.hands[0].contact]
    assert len(contact_frames) == 9
    assert all(1000 <= f.t_ms < 1150 for f in contact_frames)
    assert contact_frames[0].t_ms == 1000


def test_place_and_glide_linear(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.1, 0.5), t=0),
        ScriptStep(op="glide", magnet="m1", from_xy=(0.1, 0.5), to_xy=(0.9, 0.5),
                   t0=0, t1=1000),
    ]
    frames = expand(steps, roster)
    xs = [f.markers[0].center[0] for f in frames]
    steps_x = [b - a for a, b in zip(xs, xs[1:])]
    # per-frame displacement is path length / frame count (uniform up to ms rounding)
    expected = 0.8 / (1000 / (1000 / 60.0))
    for dx in steps_x:
        assert dx == pytest.approx(expected, rel=0.15)
    assert xs[0] == pytest.approx(0.1, abs=1e-6)


def test_flip_swaps_sides_exclusively(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="flip", magnet="m1", t=500),
    ]
    frames = expand(steps, roster, duration=1000)
    for frame in frames:
        ids = [m.fiducial_id for m in frame.markers]
        assert len(ids) == 1
        if frame.t_ms > 500:
            assert ids == [2]
        elif frame.t_ms < 500:
            assert ids == [1]


def test_spin_interpolates_rotation(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="spin", magnet="m1", delta_deg=180.0, t0=0, t1=1000),
    ]
    frames = expand(steps, roster)
    mid = next(f for f in frames if f.t_ms == 500)
    assert mid.markers[0].rotation_deg == pytest.approx(90.0, abs=1.0)


def test_occlusion_transparency(roster):
    base_steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.2, 0.2), t=0),
        ScriptStep(op="glide", magnet="m1", from_xy=(0.2, 0.2), to_xy=(0.8, 0.8),
                   t0=0, t1=2000),
    ]
    occluded_steps = base_steps + [ScriptStep(op="occlude", magnet="m1", t0=500, t1=900)]
    plain = expand(base_steps, roster)
    occluded = expand(occluded_steps, roster)
    assert len(plain) == len(occluded)
    for p, o in zip(plain, occluded):
        if 500 <= p.t_ms < 900:
            assert not o.markers
        else:
            assert p == o  # pose identical outside (and unaffected by) the occlusion


def test_hover_and_handoff_contactless(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
        ScriptStep(op="hover", magnet="m1", t0=0, t1=500),
        ScriptStep(op="handoff", xy=(0.9, 0.9), t0=0, t1=500),
    ]
    frames = expand(steps, roster)
    first = frames[0]
    assert len(first.hands) == 2
    assert not any(h.contact for h in first.hands)
    assert first.hands[0].fingertip == (0.5, 0.5)
    assert first.hands[1].fingertip == (0.9, 0.9)


def test_touch_tracks_gliding_magnet(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.1, 0.5), t=0),
        ScriptStep(op="glide", magnet="m1", from_xy=(0.1, 0.5), to_xy=(0.9, 0.5),
                   t0=0, t1=1000),
        ScriptStep(op="touch", magnet="m1", t0=200, t1=800),
    ]
    for frame in expand(steps, roster):
        if frame.hands:
            assert frame.hands[0].fingertip == frame.markers[0].center


def test_script_determinism(roster):
    steps = [
        ScriptStep(op="place", magnet="m1", side="a", xy=(0.25, 0.75), t=0),
        ScriptStep(op="spin", magnet="m1", delta_deg=360.0, t0=100, t1=2100),
        ScriptStep(op="touch", magnet="m1", t0=2500, t1=2700),
    ]
    a = serialize_stream(expand(steps, roster))
    b = serialize_stream(expand(steps, roster))
    assert a == b


@pytest.mark.parametrize(
    "steps",
    [
        [
            ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
            ScriptStep(op="glide", magnet="m1", from_xy=(0.1, 0.1), to_xy=(0.2, 0.2), t0=0, t1=500),
            ScriptStep(op="glide", magnet="m1", from_xy=(0.2, 0.2), to_xy=(0.3, 0.3), t0=400, t1=900),
        ],
        [
            ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
            ScriptStep(op="touch", magnet="m1", t0=0, t1=500),
            ScriptStep(op="hover", magnet="m1", t0=300, t1=800),
        ],
        [
            ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
            ScriptStep(op="place", magnet="m1", side="a", xy=(0.6, 0.5), t=300),
        ],
        [ScriptStep(op="remove", magnet="m1", t=100)],
        [ScriptStep(op="flip", magnet="m1", t=100)],
        [
            ScriptStep(op="place", magnet="m1", side="a", xy=(0.5, 0.5), t=0),
            ScriptStep(op="spin", magnet="m1", delta_deg=90.0, t0=500, t1=500),
        ],
    ],
)
def test_conflicting_scripts_rejected(roster, steps):
    with pytest.raises(ScriptConflict):
        expand(steps, roster, duration=2000)


def test_unknown_magnet_rejected(roster):
    steps = [ScriptStep(op="place", magnet="ghost", side="a", xy=(0.5, 0.5), t=0)]
    with pytest.raises(ReferentialError):
        expand(steps, roster)


def test_script_serialization_round_trip(golden):
    text = serialize_script(golden)
    assert parse_script(text) == golden
    assert serialize_script(parse_script(text)) == text


def test_committed_golden_script_matches_builder(golden, data_dir):
    committed = (data_dir / "alliance_golden.script.json").read_text()
    assert committed == serialize_script(golden)
