import json

from netboard.cli import main
from netboard.command_sets import load_command_set


def test_validate_story_ok(data_dir, capsys):
    assert main(["validate-story", str(data_dir / "alliance.story.json")]) == 0
    assert "no violations" in capsys.readouterr().out


def test_validate_story_reports_violation(tmp_path, data_dir, capsys):
    data = json.loads((data_dir / "alliance.story.json").read_text())
    data["magnets"][0]["side_a_marker"] = data["magnets"][1]["side_a_marker"]
    bad = tmp_path / "bad.story.json"
    bad.write_text(json.dumps(data))
    assert main(["validate-story", str(bad)]) == 1
    assert "DUP_FIDUCIAL" in capsys.readouterr().out


def test_validate_story_missing_file():
    assert main(["validate-story", "/nonexistent/story.json"]) == 2


def test_export_command_set(capsys):
    assert main(["export-command-set", "default"]) == 0
    exported = capsys.readouterr().out
    assert load_command_set(exported).set_id == "default"
    assert main(["export-command-set", "nope"]) == 1


def test_script_expansion(tmp_path, data_dir):
    out = tmp_path / "frames.jsonl"
    code = main([
        "script", str(data_dir / "alliance_golden.script.json"),
        "--story", str(data_dir / "alliance.story.json"),
        "--out", str(out),
    ])
    assert code == 0
    from netboard.frames import parse_stream

    frames = parse_stream(out.read_text())
    assert len(frames) == 3180


def test_replay_scenario_produces_outputs(tmp_path, data_dir, capsys):
    out_dir = tmp_path / "run"
    code = main([
        "replay",
        "--story", str(data_dir / "alliance.story.json"),
        "--scenario", str(data_dir / "alliance_golden.script.json"),
        "--out-dir", str(out_dir),
    ])
    assert code == 0
    assert (out_dir / "actions.jsonl").read_text() == (
        data_dir / "alliance_golden_actions.jsonl"
    ).read_text()
    assert (out_dir / "commands.jsonl").read_text() == (
        data_dir / "alliance_golden_commands.jsonl"
    ).read_text()
    assert (out_dir / "snapshot.json").read_bytes() == (
        data_dir / "alliance_golden_snapshot.json"
    ).read_bytes()
    assert (out_dir / "scene.png").stat().st_size > 10_000
    assert (out_dir / "timeline.png").stat().st_size > 10_000


def test_replay_frames_input(tmp_path, data_dir):
    frames_file = tmp_path / "frames.jsonl"
    main([
        "script", str(data_dir / "alliance_golden.script.json"),
        "--story", str(data_dir / "alliance.story.json"),
        "--out", str(frames_file),
    ])
    out_dir = tmp_path / "run"
    code = main([
        "replay",
        "--story", str(data_dir / "alliance.story.json"),
        "--frames", str(frames_file),
        "--out-dir", str(out_dir),
        "--no-render",
    ])
    assert code == 0
    assert (out_dir / "commands.jsonl").read_text() == (
        data_dir / "alliance_golden_commands.jsonl"
    ).read_text()


def test_replay_empty_frames(tmp_path, data_dir):
    frames_file = tmp_path / "empty.jsonl"
    frames_file.write_text("")
    out_dir = tmp_path / "out"
    code = main([
        "replay",
        "--story", str(data_dir / "alliance.story.json"),
        "--frames", str(frames_file),
        "--out-dir", str(out_dir),
        "--no-render",
    ])
    assert code == 0
    assert (out_dir / "actions.jsonl").read_text() == ""
    assert (out_dir / "commands.jsonl").read_text() == ""
    snap = json.loads((out_dir / "snapshot.json").read_text())
    assert snap["revision"] == 0


def test_replay_corrupt_frame_names_line(tmp_path, data_dir, capsys):
    frames_file = tmp_path / "frames.jsonl"
    main([
        "script", str(data_dir / "alliance_golden.script.json"),
        "--story", str(data_dir / "alliance.story.json"),
        "--out", str(frames_file),
    ])
    capsys.readouterr()
    lines = frames_file.read_text().splitlines()
    lines[6] = '{"t": broken'
    frames_file.write_text("\n".join(lines) + "\n")
    code = main([
        "replay",
        "--story", str(data_dir / "alliance.story.json"),
        "--frames", str(frames_file),
        "--out-dir", str(tmp_path / "out"),
        "--no-render",
    ])
    assert code == 1
    assert "line 7" in capsys.readouterr().err


def test_random_script_seeded(tmp_path, data_dir):
    out_a = tmp_path / "a.jsonl"
    out_b = tmp_path / "b.jsonl"
    out_c = tmp_path / "c.jsonl"
    for out, seed in ((out_a, "7"), (out_b, "7"), (out_c, "8")):
        code = main([
            "script", "-",
            "--story", str(data_dir / "alliance.story.json"),
            "--random", "6", "--seed", seed,
            "--out", str(out),
        ])
        assert code == 0
    assert out_a.read_text() == out_b.read_text()  # same seed, same stream
    assert out_a.read_text() != out_c.read_text()


def test_replay_missing_inputs(tmp_path, data_dir):
    assert main([
        "replay", "--story", "/nope.json", "--frames", "x", "--out-dir", str(tmp_path)
    ]) == 2
    assert main([
        "replay",
        "--story", str(data_dir / "alliance.story.json"),
        "--frames", "/nope.jsonl",
        "--out-dir", str(tmp_path),
    ]) == 2
