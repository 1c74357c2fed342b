import pytest

from netboard.commands import parse_commands, serialize_commands
from netboard.events import parse_events, serialize_events
from netboard.pipeline import PresenterPipeline, run_offline
from netboard.scripting import script_scenario
from netboard.vizstate import snapshot, state_to_dict, validate_state


@pytest.fixture(scope="module")
def golden_run(story, golden, default_set):
    frames = script_scenario(golden, list(story.magnets))
    return frames, run_offline(story, default_set, frames)


def test_golden_actions_match_fixture(golden_run, data_dir):
    _, (events, _, _, _) = golden_run
    committed = (data_dir / "alliance_golden_actions.jsonl").read_text()
    assert serialize_events(events) == committed


def test_golden_commands_match_fixture(golden_run, data_dir):
    _, (_, commands, _, _) = golden_run
    committed = (data_dir / "alliance_golden_commands.jsonl").read_text()
    assert serialize_commands(commands) == committed


def test_golden_snapshot_matches_fixture(golden_run, data_dir):
    _, (_, _, state, _) = golden_run
    committed = (data_dir / "alliance_golden_snapshot.json").read_bytes()
    assert snapshot(state) == committed


def test_state_valid_after_every_golden_step(story, golden, default_set):
    frames = script_scenario(golden, list(story.magnets))
    pipeline = PresenterPipeline(story, default_set)
    for frame in frames:
        step = pipeline.feed_frame(frame)
        if step.commands:
            assert validate_state(pipeline.state, story) == []
    pipeline.finish()
    assert validate_state(pipeline.state, story) == []


def test_command_replay_reproduces_snapshot(golden_run, story):
    from netboard.vizstate import replay

    _, (_, commands, state, _) = golden_run
    assert state_to_dict(replay(story, commands)) == state_to_dict(state)


def test_revision_counts_commands(golden_run):
    _, (_, commands, state, _) = golden_run
    assert state.revision == len(commands)


def test_diffs_cover_full_evolution(story, golden, default_set):
    from netboard.vizstate import apply_diff, initial_state

    frames = script_scenario(golden, list(story.magnets))
    pipeline = PresenterPipeline(story, default_set)
    snap = state_to_dict(initial_state(story))
    for frame in frames:
        step = pipeline.feed_frame(frame)
        for diff in step.diffs:
            snap = apply_diff(snap, diff.to_dict())
    step = pipeline.finish()
    for diff in step.diffs:
        snap = apply_diff(snap, diff.to_dict())
    assert snap == state_to_dict(pipeline.state)


def test_no_internal_queue_growth(story, golden, default_set):
    frames = script_scenario(golden, list(story.magnets))
    pipeline = PresenterPipeline(story, default_set)
    for frame in frames:
        pipeline.feed_frame(frame)
        assert len(pipeline.recognizer.tracks) <= len(story.magnets)
        assert len(pipeline.pending.open_holds) <= len(story.magnets)
        assert len(pipeline.pending.completed_holds) == 0  # drained every frame
        assert len(pipeline.pending.registrations) <= len(story.magnets)


def test_trace_round_trips(golden_run):
    _, (events, commands, _, _) = golden_run
    assert parse_events(serialize_events(events)) == events
    assert parse_commands(serialize_commands(commands)) == commands
