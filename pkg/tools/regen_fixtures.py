"""Regenerates every committed golden fixture from the builders.

Covers tests/data (story, script, action/command traces, snapshot) and the
frontend test data (story copy, session message stream, scene reference).
Run from the repository root after an intentional golden-path change, then
re-run both test suites.
"""
from __future__ import annotations

import runpy
import sys
from pathlib import Path

from netboard.command_sets import BUILTIN_SETS
from netboard.commands import serialize_commands
from netboard.events import serialize_events
from netboard.pipeline import run_offline
from netboard.scenarios import demo_story, golden_script
from netboard.scripting import script_scenario, serialize_script
from netboard.story import serialize_story
from netboard.vizstate import snapshot

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    data = ROOT / "tests" / "data"
    data.mkdir(parents=True, exist_ok=True)
    story = demo_story()
    script = golden_script()
    data.joinpath("alliance.story.json").write_bytes(serialize_story(story))
    data.joinpath("alliance_golden.script.json").write_text(serialize_script(script))
    frames = script_scenario(script, list(story.magnets))
    events, commands, state, _ = run_offline(story, BUILTIN_SETS["default"], frames)
    data.joinpath("alliance_golden_actions.jsonl").write_text(serialize_events(events))
    data.joinpath("alliance_golden_commands.jsonl").write_text(serialize_commands(commands))
    data.joinpath("alliance_golden_snapshot.json").write_bytes(snapshot(state))
    print(f"tests/data: {len(frames)} frames, {len(events)} actions, {len(commands)} commands")

    runpy.run_path(str(ROOT / "frontend" / "tools" / "export_fixtures.py"), run_name="__main__")


if __name__ == "__main__":
    sys.exit(main())
