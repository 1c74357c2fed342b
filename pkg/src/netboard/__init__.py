"""netboard: steer live node-link network stories with tracked magnets.

The pipeline runs in four stages, each usable on its own:

* ``story``: pre-registered network documents and the magnet roster
* ``frames`` / ``scripting``: the normalized tracking protocol and
  deterministic gesture-script expansion
* ``recognizer`` (with ``batch_oracle`` as its differential twin): frames
  to discrete user actions
* ``mapper`` + ``vizstate``: actions to commands to revisioned state

``pipeline`` composes the stages; ``service`` exposes them over a websocket
session; ``cli`` drives everything from the command line.
"""
from .command_sets import BUILTIN_SETS, CommandSet, load_command_set
from .commands import InteractionCommand
from .events import UserActionEvent
from .frames import HandObservation, MarkerObservation, ObservationFrame, parse_frame, serialize_frame
from .recognizer import RecognizerConfig, RecognizerState, ingest_frame, finalize, unwrap_rotation
from .batch_oracle import batch_reference
from .scripting import GestureScript, ScriptStep, script_scenario
from .story import StoryDocument, parse_story, serialize_story, validate_story
from .vizstate import VizState, apply_command, auto_reveal, initial_state, replay, snapshot

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SETS",
    "CommandSet",
    "GestureScript",
    "HandObservation",
    "InteractionCommand",
    "MarkerObservation",
    "ObservationFrame",
    "RecognizerConfig",
    "RecognizerState",
    "ScriptStep",
    "StoryDocument",
    "UserActionEvent",
    "VizState",
    "apply_command",
    "auto_reveal",
    "batch_reference",
    "finalize",
    "ingest_frame",
    "initial_state",
    "load_command_set",
    "parse_frame",
    "parse_story",
    "replay",
    "script_scenario",
    "serialize_frame",
    "serialize_story",
    "snapshot",
    "unwrap_rotation",
    "validate_story",
]
