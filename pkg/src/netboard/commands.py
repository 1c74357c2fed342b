"""Network-visualization commands produced by the command mapper.

Commands are immutable values serialized as line-delimited records, one per
line, the same style as frames and action events.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ParseError, SchemaError

COMMAND_KINDS = (
    "register",
    "show_node",
    "hide_node",
    "reposition_node",
    "scale_node",
    "change_node_state",
    "highlight_node",
    "show_link",
    "hide_link",
    "change_link_type",
    "change_link_direction",
    "scale_link",
    "show_or_extend_group",
    "hide_or_shrink_group",
    "toggle_annotation",
    "toggle_child_network",
)


@dataclass(frozen=True)
class InteractionCommand:
    t_ms: int
    kind: str
    node: str = ""
    node_b: str = ""
    magnet: str = ""
    xy: tuple[float, float] | None = None
    factor: float = 0.0
    on: bool = False

    def signature(self) -> tuple:
        """Kind plus targets, ignoring timestamps and payload geometry."""
        out: tuple = (self.kind,)
        if self.node:
            out += (self.node,)
        if self.node_b:
            out += (self.node_b,)
        if self.magnet:
            out += (self.magnet,)
        return out


def register(t, magnet: str, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="register", magnet=magnet, node=node)


def show_node(t, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="show_node", node=node)


def hide_node(t, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="hide_node", node=node)


def reposition_node(t, node: str, xy) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="reposition_node", node=node, xy=tuple(xy))


def scale_node(t, node: str, factor: float) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="scale_node", node=node, factor=factor)


def change_node_state(t, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="change_node_state", node=node)


def highlight_node(t, node: str, on: bool) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="highlight_node", node=node, on=on)


def show_link(t, a: str, b: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="show_link", node=a, node_b=b)


def hide_link(t, a: str, b: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="hide_link", node=a, node_b=b)


def change_link_type(t, a: str, b: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="change_link_type", node=a, node_b=b)


def change_link_direction(t, first: str, second: str) -> InteractionCommand:
    """Direction follows tap order: first-tapped node points at second-tapped."""
    return InteractionCommand(t_ms=t, kind="change_link_direction", node=first, node_b=second)


def scale_link(t, a: str, b: str, factor: float) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="scale_link", node=a, node_b=b, factor=factor)


def show_or_extend_group(t, a: str, b: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="show_or_extend_group", node=a, node_b=b)


def hide_or_shrink_group(t, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="hide_or_shrink_group", node=node)


def toggle_annotation(t, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="toggle_annotation", node=node)


def toggle_child_network(t, node: str) -> InteractionCommand:
    return InteractionCommand(t_ms=t, kind="toggle_child_network", node=node)


def command_to_dict(cmd: InteractionCommand) -> dict:
    out: dict = {"t": cmd.t_ms, "kind": cmd.kind}
    if cmd.node:
        out["node"] = cmd.node
    if cmd.node_b:
        out["node_b"] = cmd.node_b
    if cmd.magnet:
        out["magnet"] = cmd.magnet
    if cmd.xy is not None:
        out["xy"] = list(cmd.xy)
    if cmd.kind in ("scale_node", "scale_link"):
        out["factor"] = cmd.factor
    if cmd.kind == "highlight_node":
        out["on"] = cmd.on
    return out


def serialize_command(cmd: InteractionCommand) -> str:
    return json.dumps(command_to_dict(cmd), sort_keys=True)


def parse_command(record: str) -> InteractionCommand:
    try:
        data = json.loads(record)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed command record: {exc.msg}", column=exc.colno) from exc
    kind = data.get("kind")
    if kind not in COMMAND_KINDS:
        raise SchemaError(f"unknown command kind {kind!r}")
    return InteractionCommand(
        t_ms=int(data["t"]),
        kind=kind,
        node=data.get("node", ""),
        node_b=data.get("node_b", ""),
        magnet=data.get("magnet", ""),
        xy=tuple(data["xy"]) if "xy" in data else None,
        factor=float(data.get("factor", 0.0)),
        on=bool(data.get("on", False)),
    )


def serialize_commands(commands: list[InteractionCommand]) -> str:
    return "".join(serialize_command(c) + "\n" for c in commands)


def parse_commands(text: str) -> list[InteractionCommand]:
    return [parse_command(line) for line in text.splitlines() if line.strip()]
