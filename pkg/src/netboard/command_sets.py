"""Named command sets: ambiguity-checked mappings from actions to commands.

A command set enumerates which action patterns are enabled and which command
template each one drives, plus the semantic switches that resolve the two
action collisions a presenter-facing mapping runs into: sequential taps
(link visibility vs link direction) and rotation (node scaling vs child
network toggling). A set is rejected at load time if two enabled patterns
could match the same action context.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import AmbiguityError, ParseError, SchemaError

ACTIONS = (
    "attach",
    "detach",
    "slide",
    "rotate",
    "full_revolution",
    "flip",
    "tap",
    "hold",
    "point_dwell",
    "bring_closer",
    "moved_apart",
    "cover",
    "stack",
    "unstack",
)
BINDINGS = ("bound", "unbound", "any")
ZONES = ("registration", "storyboard", "any")
TEMPLATES = (
    "register-node",
    "place-node",
    "hide-node",
    "scale",
    "toggle-child",
    "cycle-node-state",
    "link-sequence",
    "hold-intent",
    "annotate",
    "extend-group",
    "shrink-group",
    "highlight",
)
TAP_PAIR_SEMANTICS = ("toggle-visibility", "set-direction")
ROTATE_SEMANTICS = ("scale-with-revolution-toggle", "scale-only", "revolution-only")
ANNOTATION_TRIGGERS = ("point-dwell", "hold", "either")


@dataclass(frozen=True)
class ActionPattern:
    action: str
    binding: str = "any"
    zone: str = "any"
    command: str = ""

    def describe(self) -> str:
        return f"{self.action}/{self.binding}/{self.zone} -> {self.command}"


@dataclass(frozen=True)
class CommandSet:
    set_id: str
    tap_pair_semantics: str = "toggle-visibility"
    rotate_semantics: str = "scale-with-revolution-toggle"
    annotation_trigger: str = "either"
    w_seq_ms: int = 2000
    w_sim_ms: int = 500
    slot_dwell_ms: int = 400
    patterns: tuple[ActionPattern, ...] = ()

    def match(self, action: str, binding: str, zone: str) -> ActionPattern | None:
        for p in self.patterns:
            if p.action != action:
                continue
            if p.binding != "any" and p.binding != binding:
                continue
            if p.zone != "any" and p.zone != zone:
                continue
            return p
        return None


_STANDARD_PATTERNS = (
    ActionPattern("attach", "any", "registration", "register-node"),
    ActionPattern("attach", "bound", "storyboard", "place-node"),
    ActionPattern("slide", "bound", "storyboard", "place-node"),
    ActionPattern("detach", "bound", "any", "hide-node"),
    ActionPattern("rotate", "bound", "any", "scale"),
    ActionPattern("full_revolution", "bound", "any", "toggle-child"),
    ActionPattern("flip", "bound", "any", "cycle-node-state"),
    ActionPattern("tap", "bound", "any", "link-sequence"),
    ActionPattern("hold", "bound", "any", "hold-intent"),
    ActionPattern("point_dwell", "bound", "any", "annotate"),
    ActionPattern("bring_closer", "bound", "any", "extend-group"),
    ActionPattern("cover", "bound", "any", "shrink-group"),
    ActionPattern("stack", "any", "any", "highlight"),
    ActionPattern("unstack", "any", "any", "highlight"),
)

BUILTIN_SETS = {
    "default": CommandSet(
        set_id="default",
        tap_pair_semantics="toggle-visibility",
        rotate_semantics="scale-with-revolution-toggle",
        annotation_trigger="either",
        patterns=_STANDARD_PATTERNS,
    ),
    "directional": CommandSet(
        set_id="directional",
        tap_pair_semantics="set-direction",
        rotate_semantics="scale-only",
        annotation_trigger="point-dwell",
        patterns=_STANDARD_PATTERNS,
    ),
}


def _bindings_intersect(a: str, b: str) -> bool:
    return a == "any" or b == "any" or a == b


def _zones_intersect(a: str, b: str) -> bool:
    return a == "any" or b == "any" or a == b


def check_ambiguity(patterns: tuple[ActionPattern, ...]) -> None:
    """No two enabled patterns may match the same action context."""
    for i, p in enumerate(patterns):
        for q in patterns[i + 1 :]:
            if (
                p.action == q.action
                and _bindings_intersect(p.binding, q.binding)
                and _zones_intersect(p.zone, q.zone)
            ):
                raise AmbiguityError(
                    f"patterns conflict: [{p.describe()}] and [{q.describe()}]"
                )


def command_set_to_dict(cs: CommandSet) -> dict:
    return {
        "set_id": cs.set_id,
        "tap_pair_semantics": cs.tap_pair_semantics,
        "rotate_semantics": cs.rotate_semantics,
        "annotation_trigger": cs.annotation_trigger,
        "w_seq_ms": cs.w_seq_ms,
        "w_sim_ms": cs.w_sim_ms,
        "slot_dwell_ms": cs.slot_dwell_ms,
        "patterns": [
            {"action": p.action, "binding": p.binding, "zone": p.zone, "command": p.command}
            for p in cs.patterns
        ],
    }


def serialize_command_set(cs: CommandSet) -> str:
    return json.dumps(command_set_to_dict(cs), indent=2, sort_keys=True) + "\n"


def load_command_set(text: bytes | str) -> CommandSet:
    """Parse and ambiguity-check a command-set config document."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed command set: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise SchemaError("command set must be a JSON object")
    set_id = data.get("set_id")
    if not isinstance(set_id, str) or not set_id:
        raise SchemaError("command set needs a set_id")

    def pick(key: str, allowed: tuple, default: str) -> str:
        value = data.get(key, default)
        if value not in allowed:
            raise SchemaError(f"{key} must be one of {allowed}, got {value!r}")
        return value

    patterns = []
    for entry in data.get("patterns", []):
        if not isinstance(entry, dict):
            raise SchemaError(f"bad pattern entry {entry!r}")
        action = entry.get("action")
        if action not in ACTIONS:
            raise SchemaError(f"unknown pattern action {action!r}")
        binding = entry.get("binding", "any")
        if binding not in BINDINGS:
            raise SchemaError(f"unknown pattern binding {binding!r}")
        zone = entry.get("zone", "any")
        if zone not in ZONES:
            raise SchemaError(f"unknown pattern zone {zone!r}")
        command = entry.get("command")
        if command not in TEMPLATES:
            raise SchemaError(f"unknown command template {command!r}")
        patterns.append(ActionPattern(action, binding, zone, command))

    cs = CommandSet(
        set_id=set_id,
        tap_pair_semantics=pick("tap_pair_semantics", TAP_PAIR_SEMANTICS, "toggle-visibility"),
        rotate_semantics=pick("rotate_semantics", ROTATE_SEMANTICS, "scale-with-revolution-toggle"),
        annotation_trigger=pick("annotation_trigger", ANNOTATION_TRIGGERS, "either"),
        w_seq_ms=int(data.get("w_seq_ms", 2000)),
        w_sim_ms=int(data.get("w_sim_ms", 500)),
        slot_dwell_ms=int(data.get("slot_dwell_ms", 400)),
        patterns=tuple(patterns),
    )
    check_ambiguity(cs.patterns)
    return cs


def resolve_command_set(ref: str) -> CommandSet:
    """Look up a built-in set by id or load one from a file path."""
    if ref in BUILTIN_SETS:
        return BUILTIN_SETS[ref]
    try:
        with open(ref, "rb") as fh:
            return load_command_set(fh.read())
    except FileNotFoundError:
        raise SchemaError(f"unknown command set {ref!r} (not built-in, not a file)") from None
