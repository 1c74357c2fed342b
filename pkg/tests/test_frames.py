import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netboard.errors import ParseError, RangeError, RateError, TimestampError
from netboard.frames import (
    HandObservation,
    MarkerObservation,
    ObservationFrame,
    parse_frame,
    parse_stream,
    resample_stream,
    sample_times,
    serialize_frame,
    serialize_stream,
)


def test_empty_frame_round_trips():
    frame = ObservationFrame(t_ms=12)
    assert parse_frame(serialize_frame(frame)) == frame


def test_identity_decode():
    record = '{"t": 5, "markers": [{"id": 17, "x": 0.5, "y": 0.5, "rot": 90.0, "conf": 1.0}], "hands": []}'
    frame = parse_frame(record)
    assert frame.markers[0].fiducial_id == 17
    assert frame.markers[0].center == (0.5, 0.5)
    assert frame.markers[0].rotation_deg == 90.0


def test_rotation_360_rejected():
    with pytest.raises(RangeError):
        MarkerObservation(fiducial_id=1, center=(0.5, 0.5), rotation_deg=360.0)
    with pytest.raises((ParseError, RangeError)):
        parse_frame('{"t": 0, "markers": [{"id": 1, "x": 0.5, "y": 0.5, "rot": 360.0}]}')


def test_out_of_board_coordinate_rejected():
    with pytest.raises(RangeError):
        MarkerObservation(fiducial_id=1, center=(1.2, 0.5))
    with pytest.raises(RangeError):
        HandObservation(hand_id=0, fingertip=(0.5, -0.1))


def test_duplicate_fiducials_rejected():
    with pytest.raises(RangeError):
        ObservationFrame(
            t_ms=0,
            markers=(
                MarkerObservation(1, (0.1, 0.1)),
                MarkerObservation(1, (0.2, 0.2)),
            ),
        )


def test_ten_marker_frame_round_trips():
    frame = ObservationFrame(
        t_ms=1000,
        markers=tuple(
            MarkerObservation(fiducial_id=k, center=(k / 20.0, 0.5), rotation_deg=k * 17.0)
            for k in range(10)
        ),
        hands=(HandObservation(0, (0.5, 0.5), True),),
    )
    assert parse_frame(serialize_frame(frame)) == frame


def test_serialization_deterministic_and_sorted():
    a = ObservationFrame(
        t_ms=3,
        markers=(MarkerObservation(9, (0.3, 0.3)), MarkerObservation(2, (0.1, 0.1))),
    )
    b = ObservationFrame(
        t_ms=3,
        markers=(MarkerObservation(2, (0.1, 0.1)), MarkerObservation(9, (0.3, 0.3))),
    )
    assert serialize_frame(a) == serialize_frame(b)
    assert serialize_frame(a).index('"id": 2') < serialize_frame(a).index('"id": 9')


def test_stream_monotonicity_enforced():
    text = serialize_frame(ObservationFrame(t_ms=10)) + "\n" + serialize_frame(
        ObservationFrame(t_ms=10)
    )
    with pytest.raises(TimestampError):
        parse_stream(text)


coords = st.integers(min_value=0, max_value=10**6).map(lambda n: n / 10**6)
rotations = st.integers(min_value=0, max_value=359_999_999).map(lambda n: n / 10**6)


@given(
    st.lists(
        st.tuples(st.integers(min_value=0, max_value=999), coords, coords, rotations),
        max_size=8,
        unique_by=lambda t: t[0],
    ),
    st.lists(st.tuples(st.integers(0, 3), coords, coords, st.booleans()), max_size=3,
             unique_by=lambda t: t[0]),
)
@settings(max_examples=200, deadline=None)
def test_frame_round_trip_property(markers, hands):
    frame = ObservationFrame(
        t_ms=1234,
        markers=tuple(
            MarkerObservation(fiducial_id=i, center=(x, y), rotation_deg=rot)
            for i, x, y, rot in markers
        ),
        hands=tuple(
            HandObservation(hand_id=i, fingertip=(x, y), contact=c) for i, x, y, c in hands
        ),
    )
    assert parse_frame(serialize_frame(frame)) == frame


# resampling


def test_resample_empty():
    assert resample_stream([], 30.0) == []


def test_resample_rejects_bad_rate():
    with pytest.raises(RateError):
        resample_stream([ObservationFrame(t_ms=0)], 0.0)


def _static_stream(rate_hz: float, duration_ms: int):
    return [
        ObservationFrame(
            t_ms=t,
            markers=(MarkerObservation(1, (0.25, 0.75), rotation_deg=45.0),),
        )
        for t in sample_times(0, duration_ms, rate_hz)
    ]


def test_resample_identity_at_same_rate():
    frames = _static_stream(60.0, 1000)
    assert resample_stream(frames, 60.0) == frames


def test_resample_60_to_30_static():
    frames = _static_stream(60.0, 1000)
    out = resample_stream(frames, 30.0)
    assert len(out) == 30
    for frame in out:
        assert frame.markers[0].center == (0.25, 0.75)
        assert frame.markers[0].rotation_deg == 45.0
    times = [f.t_ms for f in out]
    assert times == sorted(set(times))


def test_resample_interpolates_positions():
    frames = [
        ObservationFrame(t_ms=0, markers=(MarkerObservation(1, (0.0, 0.0)),)),
        ObservationFrame(t_ms=100, markers=(MarkerObservation(1, (0.1, 0.0)),)),
    ]
    out = resample_stream(frames, 20.0)  # 50 ms period
    assert [f.t_ms for f in out] == [0, 50, 100]
    assert out[1].markers[0].center[0] == pytest.approx(0.05, abs=1e-6)


def test_resample_interpolates_rotation_with_wraparound():
    frames = [
        ObservationFrame(t_ms=0, markers=(MarkerObservation(1, (0.5, 0.5), rotation_deg=350.0),)),
        ObservationFrame(t_ms=100, markers=(MarkerObservation(1, (0.5, 0.5), rotation_deg=10.0),)),
    ]
    out = resample_stream(frames, 20.0)
    assert out[1].markers[0].rotation_deg == pytest.approx(0.0, abs=1e-6)


def test_stream_serialization_round_trip():
    frames = _static_stream(60.0, 500)
    assert parse_stream(serialize_stream(frames)) == frames
