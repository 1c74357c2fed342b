from netboard.commands import parse_commands
from netboard.events import parse_events
from netboard.render import render_scene, render_timeline
from netboard.vizstate import replay


def test_scene_render_writes_png(tmp_path, story, data_dir):
    trace = parse_commands((data_dir / "alliance_golden_commands.jsonl").read_text())
    state = replay(story, trace)
    out = tmp_path / "scene.png"
    render_scene(state, story, str(out), title="final scene")
    assert out.exists() and out.stat().st_size > 10_000


def test_scene_render_initial_state(tmp_path, story):
    from netboard.vizstate import initial_state

    out = tmp_path / "empty.png"
    render_scene(initial_state(story), story, str(out))
    assert out.exists() and out.stat().st_size > 0


def test_timeline_render(tmp_path, data_dir):
    events = parse_events((data_dir / "alliance_golden_actions.jsonl").read_text())
    commands = parse_commands((data_dir / "alliance_golden_commands.jsonl").read_text())
    out = tmp_path / "timeline.png"
    render_timeline(events, commands, str(out))
    assert out.exists() and out.stat().st_size > 10_000
