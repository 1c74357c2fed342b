"""Command-line interface: run a live session, replay scenarios offline,
validate stories, export command sets, and expand gesture scripts."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .command_sets import BUILTIN_SETS, resolve_command_set, serialize_command_set
from .commands import serialize_commands
from .errors import NetboardError, ParseError
from .events import serialize_events
from .frames import parse_stream, serialize_stream
from .pipeline import run_offline
from .recognizer import RecognizerConfig
from .scripting import parse_script, script_scenario
from .story import parse_story, validate_story
from .vizstate import snapshot as snapshot_state

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MISSING = 2


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_story(path: str):
    return parse_story(_read(path))


def _load_config(path: str | None) -> RecognizerConfig:
    if not path:
        return RecognizerConfig()
    return RecognizerConfig.from_dict(json.loads(_read(path)))


def cmd_validate_story(args) -> int:
    try:
        raw = _read(args.story)
    except OSError as exc:
        print(f"cannot read story: {exc}", file=sys.stderr)
        return EXIT_MISSING
    try:
        doc = parse_story(raw, check=False)
    except NetboardError as exc:
        print(f"story does not parse: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = validate_story(doc)
    print(report)
    return EXIT_OK if report.ok() else EXIT_ERROR


def cmd_export_command_set(args) -> int:
    if args.set_id not in BUILTIN_SETS:
        print(f"unknown built-in command set {args.set_id!r}; "
              f"available: {', '.join(sorted(BUILTIN_SETS))}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(serialize_command_set(BUILTIN_SETS[args.set_id]))
    return EXIT_OK


def cmd_script(args) -> int:
    try:
        story = _load_story(args.story)
    except OSError as exc:
        print(f"cannot read story: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except NetboardError as exc:
        print(f"story failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        if args.script == "-" or args.random:
            import random as _random

            from .scenarios import margin_script

            script = margin_script(_random.Random(args.seed), story, gestures=args.random or 14)
        else:
            script = parse_script(_read(args.script))
        if args.rate:
            from dataclasses import replace

            script = replace(script, rate_hz=args.rate)
        frames = script_scenario(script, list(story.magnets))
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except NetboardError as exc:
        print(f"script expansion failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = serialize_stream(frames)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(frames)} frames to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        story = _load_story(args.story)
    except OSError as exc:
        print(f"cannot read story: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except NetboardError as exc:
        print(f"story failed: {exc}", file=sys.stderr)
        return EXIT_ERROR

    try:
        command_set = resolve_command_set(args.command_set or story.command_set_ref)
        config = _load_config(args.recognizer_config)
    except NetboardError as exc:
        print(f"configuration failed: {exc}", file=sys.stderr)
        return EXIT_ERROR

    try:
        if args.frames:
            frames = parse_stream(Path(args.frames).read_text(encoding="utf-8"))
        elif args.scenario:
            script = parse_script(_read(args.scenario))
            if args.rate:
                from dataclasses import replace

                script = replace(script, rate_hz=args.rate)
            frames = script_scenario(script, list(story.magnets))
        else:
            print("replay needs --frames or --scenario", file=sys.stderr)
            return EXIT_ERROR
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except NetboardError as exc:
        print(f"input failed: {exc}", file=sys.stderr)
        return EXIT_ERROR

    events, commands, state, pipeline = run_offline(story, command_set, frames, config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "actions.jsonl").write_text(serialize_events(events), encoding="utf-8")
    (out_dir / "commands.jsonl").write_text(serialize_commands(commands), encoding="utf-8")
    (out_dir / "snapshot.json").write_bytes(snapshot_state(state))
    if not args.no_render:
        from .render import render_scene, render_timeline

        render_scene(state, story, str(out_dir / "scene.png"),
                     title=f"{story.story_id} (final, revision {state.revision})")
        render_timeline(events, commands, str(out_dir / "timeline.png"))
    print(
        f"replayed {len(frames)} frames: {len(events)} actions, "
        f"{len(commands)} commands, final revision {state.revision} -> {out_dir}"
    )
    return EXIT_OK


def cmd_run(args) -> int:
    import uvicorn

    from .service import SessionHub, create_app

    try:
        story = _load_story(args.story)
        command_set = resolve_command_set(args.command_set or story.command_set_ref)
        config = _load_config(args.recognizer_config)
        hub = SessionHub(story, command_set, config, log_dir=args.log_dir)
    except OSError as exc:
        print(f"cannot read story: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except NetboardError as exc:
        print(f"session setup failed: {exc}", file=sys.stderr)
        return EXIT_ERROR

    host, _, port = args.listen.rpartition(":")
    host = host or "127.0.0.1"
    app = create_app(hub)
    logger.info("serving story %s on %s:%s", story.story_id, host, port)
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="warning")
    except OSError as exc:
        print(f"cannot bind {args.listen}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netboard",
        description="Tangible network storytelling engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="serve a live session")
    p_run.add_argument("--story", required=True)
    p_run.add_argument("--command-set", default="")
    p_run.add_argument("--listen", default="127.0.0.1:8750")
    p_run.add_argument("--recognizer-config", default="")
    p_run.add_argument("--log-dir", default="")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="replay frames or a scenario offline")
    p_replay.add_argument("--story", required=True)
    p_replay.add_argument("--command-set", default="")
    p_replay.add_argument("--frames", default="")
    p_replay.add_argument("--scenario", default="")
    p_replay.add_argument("--rate", type=float, default=0.0)
    p_replay.add_argument("--recognizer-config", default="")
    p_replay.add_argument("--out-dir", required=True)
    p_replay.add_argument("--no-render", action="store_true",
                          help="skip scene/timeline figure output")
    p_replay.set_defaults(func=cmd_replay)

    p_validate = sub.add_parser("validate-story", help="validate a story file")
    p_validate.add_argument("story")
    p_validate.set_defaults(func=cmd_validate_story)

    p_export = sub.add_parser("export-command-set", help="print a built-in command set")
    p_export.add_argument("set_id")
    p_export.set_defaults(func=cmd_export_command_set)

    p_script = sub.add_parser("script", help="expand a gesture script to frames")
    p_script.add_argument("script", help="script file, or '-' with --random/--seed")
    p_script.add_argument("--story", required=True)
    p_script.add_argument("--rate", type=float, default=0.0)
    p_script.add_argument("--random", type=int, default=0, metavar="GESTURES",
                          help="generate a random scenario instead of reading a file")
    p_script.add_argument("--seed", type=int, default=0)
    p_script.add_argument("--out", default="")
    p_script.set_defaults(func=cmd_script)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
