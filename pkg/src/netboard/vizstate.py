"""Event-sourced visualization state with automatic secondary reveal.

Commands apply one at a time: each successful application bumps the revision
by exactly one and appends to the command log; a rejected command
(UnknownTarget, IllegalCommand) leaves state and revision untouched. Node and
link scale factors are relative to the story's base sizes and clamped to
[0.5, 2.0] and [0.25, 4.0].

Secondary nodes are never commanded directly: after every node visibility
change a reveal pass pins each secondary's visibility to its anchor predicate
(all/any anchors visible), pins auto links to endpoint visibility, and drops
manual links whose endpoints hid.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .commands import InteractionCommand, command_to_dict, parse_command
from .errors import IllegalCommand, ParseError, SchemaError, UnknownTarget
from .geometry import clamp
from .story import StoryDocument

SCALE_MIN, SCALE_MAX = 0.5, 2.0
WIDTH_MIN, WIDTH_MAX = 0.25, 4.0

_NODE_FIELDS = (
    "visible",
    "position",
    "scale",
    "state_index",
    "highlighted",
    "annotation_visible",
    "child_visible",
)
_LINK_FIELDS = ("visible", "type_index", "direction", "width")


@dataclass
class NodeView:
    visible: bool = False
    position: tuple[float, float] = (0.5, 0.5)
    scale: float = 1.0
    state_index: int = 0
    highlighted: bool = False
    annotation_visible: bool = False
    child_visible: bool = False

    def clone(self) -> "NodeView":
        return NodeView(
            self.visible, self.position, self.scale, self.state_index,
            self.highlighted, self.annotation_visible, self.child_visible,
        )


@dataclass
class LinkView:
    visible: bool = False
    type_index: int = 0
    direction: str = "none"
    width: float = 1.0

    def clone(self) -> "LinkView":
        return LinkView(self.visible, self.type_index, self.direction, self.width)


@dataclass
class Group:
    group_id: str
    members: set[str] = field(default_factory=set)

    def clone(self) -> "Group":
        return Group(self.group_id, set(self.members))


@dataclass
class VizState:
    revision: int = 0
    nodes: dict[str, NodeView] = field(default_factory=dict)
    links: dict[str, LinkView] = field(default_factory=dict)
    groups: list[Group] = field(default_factory=list)
    bindings: dict[str, str] = field(default_factory=dict)
    group_seq: int = 0
    command_log: list[InteractionCommand] = field(default_factory=list)

    def clone(self) -> "VizState":
        return VizState(
            revision=self.revision,
            nodes={k: v.clone() for k, v in self.nodes.items()},
            links={k: v.clone() for k, v in self.links.items()},
            groups=[g.clone() for g in self.groups],
            bindings=dict(self.bindings),
            group_seq=self.group_seq,
            command_log=list(self.command_log),
        )

    # read helpers used by the command mapper and layout
    def node_visible(self, node_id: str) -> bool:
        view = self.nodes.get(node_id)
        return view is not None and view.visible

    def group_of(self, node_id: str) -> Group | None:
        for g in self.groups:
            if node_id in g.members:
                return g
        return None

    def node_for_magnet(self, magnet_id: str) -> str | None:
        return self.bindings.get(magnet_id)


def initial_state(story: StoryDocument) -> VizState:
    state = VizState()
    for n in story.nodes:
        state.nodes[n.node_id] = NodeView(state_index=n.initial_state_index)
    for l in story.links:
        state.links[l.link_id] = LinkView(
            type_index=l.initial_type_index, direction=l.directed
        )
    return state


# --------------------------------------------------------------------------
# reveal pass


def _anchors_satisfied(story: StoryDocument, state: VizState, node_id: str) -> bool:
    spec = story.node(node_id)
    flags = [state.node_visible(a) for a in spec.anchors]
    if not flags:
        return False
    return all(flags) if spec.anchor_mode == "all" else any(flags)


def _reveal_fixpoint(state: VizState, story: StoryDocument) -> None:
    """Pin secondary and auto-link visibility to their predicates, in place."""
    for n in story.secondary_nodes():
        view = state.nodes[n.node_id]
        want = _anchors_satisfied(story, state, n.node_id)
        if view.visible != want:
            view.visible = want
            if not want:
                view.annotation_visible = False
                view.child_visible = False
    for l in story.links:
        view = state.links[l.link_id]
        both = state.node_visible(l.source) and state.node_visible(l.target)
        if l.reveal == "auto":
            view.visible = both
        elif view.visible and not both:
            view.visible = False
    _prune_groups(state)


def _prune_groups(state: VizState) -> None:
    kept: list[Group] = []
    for g in state.groups:
        g.members = {m for m in g.members if state.node_visible(m)}
        if len(g.members) >= 2:
            kept.append(g)
    state.groups = kept


def auto_reveal(state: VizState, story: StoryDocument) -> tuple[VizState, "StateDiff"]:
    """Standalone reveal pass; revision is untouched (it is not a command)."""
    new = state.clone()
    _reveal_fixpoint(new, story)
    return new, state_diff(state, new, revision=new.revision)


# --------------------------------------------------------------------------
# command application


def apply_command(
    state: VizState, story: StoryDocument, cmd: InteractionCommand
) -> tuple[VizState, "StateDiff"]:
    new = state.clone()
    _dispatch(new, story, cmd)
    new.revision = state.revision + 1
    new.command_log.append(cmd)
    return new, state_diff(state, new, revision=new.revision, command=cmd)


def _need_node(story: StoryDocument, state: VizState, node_id: str) -> NodeView:
    if node_id not in state.nodes:
        raise UnknownTarget(f"unknown node {node_id!r}")
    return state.nodes[node_id]


def _need_link(story: StoryDocument, state: VizState, a: str, b: str):
    for endpoint in (a, b):
        if endpoint not in state.nodes:
            raise UnknownTarget(f"unknown node {endpoint!r}")
    spec = story.link_between(a, b)
    if spec is None:
        raise UnknownTarget(f"no link defined between {a!r} and {b!r}")
    return spec, state.links[spec.link_id]


def _dispatch(state: VizState, story: StoryDocument, cmd: InteractionCommand) -> None:
    kind = cmd.kind
    if kind == "show_node":
        view = _need_node(story, state, cmd.node)
        if story.node(cmd.node).kind != "primary":
            raise IllegalCommand(f"{cmd.node!r} is secondary; its visibility is anchor-driven")
        view.visible = True
        _reveal_fixpoint(state, story)
    elif kind == "hide_node":
        view = _need_node(story, state, cmd.node)
        if story.node(cmd.node).kind != "primary":
            raise IllegalCommand(f"{cmd.node!r} is secondary; its visibility is anchor-driven")
        view.visible = False
        view.annotation_visible = False
        view.child_visible = False
        for l in story.links:
            if cmd.node in (l.source, l.target):
                state.links[l.link_id].visible = False
        _reveal_fixpoint(state, story)
    elif kind == "reposition_node":
        view = _need_node(story, state, cmd.node)
        if story.node(cmd.node).kind != "primary":
            raise IllegalCommand(f"{cmd.node!r} is secondary; its position is layout-driven")
        if cmd.xy is None:
            raise IllegalCommand("reposition_node needs a position")
        view.position = cmd.xy
    elif kind == "scale_node":
        view = _need_node(story, state, cmd.node)
        if cmd.factor <= 0:
            raise IllegalCommand(f"scale factor must be positive, got {cmd.factor}")
        view.scale = clamp(view.scale * cmd.factor, SCALE_MIN, SCALE_MAX)
    elif kind == "change_node_state":
        view = _need_node(story, state, cmd.node)
        view.state_index = (view.state_index + 1) % len(story.node(cmd.node).states)
    elif kind == "highlight_node":
        _need_node(story, state, cmd.node).highlighted = cmd.on
    elif kind == "show_link":
        spec, view = _need_link(story, state, cmd.node, cmd.node_b)
        if spec.reveal == "auto":
            raise IllegalCommand(f"link {spec.link_id!r} is auto-revealed")
        if not (state.node_visible(spec.source) and state.node_visible(spec.target)):
            raise IllegalCommand(f"show_link {spec.link_id!r}: an endpoint is hidden")
        view.visible = True
    elif kind == "hide_link":
        spec, view = _need_link(story, state, cmd.node, cmd.node_b)
        if spec.reveal == "auto":
            raise IllegalCommand(f"link {spec.link_id!r} is auto-revealed")
        view.visible = False
    elif kind == "change_link_type":
        spec, view = _need_link(story, state, cmd.node, cmd.node_b)
        view.type_index = (view.type_index + 1) % len(spec.types)
    elif kind == "change_link_direction":
        spec, view = _need_link(story, state, cmd.node, cmd.node_b)
        view.direction = (
            "forward" if (cmd.node, cmd.node_b) == (spec.source, spec.target) else "reverse"
        )
    elif kind == "scale_link":
        spec, view = _need_link(story, state, cmd.node, cmd.node_b)
        if cmd.factor <= 0:
            raise IllegalCommand(f"scale factor must be positive, got {cmd.factor}")
        view.width = clamp(view.width * cmd.factor, WIDTH_MIN, WIDTH_MAX)
    elif kind == "show_or_extend_group":
        for node_id in (cmd.node, cmd.node_b):
            _need_node(story, state, node_id)
            if not state.node_visible(node_id):
                raise IllegalCommand(f"cannot group hidden node {node_id!r}")
        _extend_group(state, cmd.node, cmd.node_b)
    elif kind == "hide_or_shrink_group":
        _need_node(story, state, cmd.node)
        group = state.group_of(cmd.node)
        if group is None:
            raise IllegalCommand(f"node {cmd.node!r} is not in a group")
        group.members.discard(cmd.node)
        if len(group.members) < 2:
            state.groups = [g for g in state.groups if g.group_id != group.group_id]
    elif kind == "toggle_annotation":
        view = _need_node(story, state, cmd.node)
        if story.node(cmd.node).annotation is None:
            raise IllegalCommand(f"node {cmd.node!r} has no annotation")
        view.annotation_visible = not view.annotation_visible
    elif kind == "toggle_child_network":
        view = _need_node(story, state, cmd.node)
        if not story.node(cmd.node).child_network:
            raise IllegalCommand(f"node {cmd.node!r} has no child network")
        view.child_visible = not view.child_visible
    elif kind == "register":
        _need_node(story, state, cmd.node)
        story.magnet(cmd.magnet)
        stale = [m for m, n in state.bindings.items() if n == cmd.node and m != cmd.magnet]
        for m in stale:
            del state.bindings[m]
        state.bindings[cmd.magnet] = cmd.node
    else:
        raise UnknownTarget(f"unknown command kind {cmd.kind!r}")


def _extend_group(state: VizState, a: str, b: str) -> None:
    ga, gb = state.group_of(a), state.group_of(b)
    if ga is None and gb is None:
        state.group_seq += 1
        state.groups.append(Group(f"g{state.group_seq}", {a, b}))
    elif ga is not None and gb is None:
        ga.members.add(b)
    elif ga is None and gb is not None:
        gb.members.add(a)
    elif ga.group_id != gb.group_id:
        # merge into the earlier-created group
        first, second = (ga, gb) if _seq(ga) <= _seq(gb) else (gb, ga)
        first.members |= second.members
        state.groups = [g for g in state.groups if g.group_id != second.group_id]
    # both already in the same group: nothing to change


def _seq(group: Group) -> int:
    return int(group.group_id[1:]) if group.group_id[1:].isdigit() else 0


def replay(story: StoryDocument, commands: list[InteractionCommand]) -> VizState:
    """Fold a command trace over the initial state."""
    state = initial_state(story)
    for index, cmd in enumerate(commands):
        try:
            state, _ = apply_command(state, story, cmd)
        except (UnknownTarget, IllegalCommand) as exc:
            raise type(exc)(f"trace command {index}: {exc}") from exc
    return state


# --------------------------------------------------------------------------
# diffs


@dataclass
class StateDiff:
    revision: int
    command: dict | None = None
    nodes: dict[str, dict] = field(default_factory=dict)
    links: dict[str, dict] = field(default_factory=dict)
    groups_added: list[dict] = field(default_factory=list)
    groups_removed: list[str] = field(default_factory=list)
    groups_changed: dict[str, list[str]] = field(default_factory=dict)
    bindings: dict[str, str] = field(default_factory=dict)
    bindings_removed: list[str] = field(default_factory=list)
    group_seq: int | None = None

    def empty(self) -> bool:
        return not (
            self.nodes or self.links or self.groups_added or self.groups_removed
            or self.groups_changed or self.bindings or self.bindings_removed
        )

    def to_dict(self) -> dict:
        out: dict = {"revision": self.revision}
        if self.command is not None:
            out["command"] = self.command
        if self.nodes:
            out["nodes"] = self.nodes
        if self.links:
            out["links"] = self.links
        if self.groups_added:
            out["groups_added"] = self.groups_added
        if self.groups_removed:
            out["groups_removed"] = self.groups_removed
        if self.groups_changed:
            out["groups_changed"] = self.groups_changed
        if self.bindings:
            out["bindings"] = self.bindings
        if self.bindings_removed:
            out["bindings_removed"] = self.bindings_removed
        if self.group_seq is not None:
            out["group_seq"] = self.group_seq
        return out


def _node_dict(view: NodeView) -> dict:
    return {
        "visible": view.visible,
        "position": list(view.position),
        "scale": view.scale,
        "state_index": view.state_index,
        "highlighted": view.highlighted,
        "annotation_visible": view.annotation_visible,
        "child_visible": view.child_visible,
    }


def _link_dict(view: LinkView) -> dict:
    return {
        "visible": view.visible,
        "type_index": view.type_index,
        "direction": view.direction,
        "width": view.width,
    }


def state_diff(
    old: VizState, new: VizState, revision: int, command: InteractionCommand | None = None
) -> StateDiff:
    diff = StateDiff(revision=revision, command=command_to_dict(command) if command else None)
    for node_id in sorted(new.nodes):
        before, after = _node_dict(old.nodes[node_id]), _node_dict(new.nodes[node_id])
        changed = {k: after[k] for k in after if after[k] != before[k]}
        if changed:
            diff.nodes[node_id] = changed
    for link_id in sorted(new.links):
        before, after = _link_dict(old.links[link_id]), _link_dict(new.links[link_id])
        changed = {k: after[k] for k in after if after[k] != before[k]}
        if changed:
            diff.links[link_id] = changed
    old_groups = {g.group_id: g for g in old.groups}
    new_groups = {g.group_id: g for g in new.groups}
    for gid in sorted(new_groups):
        if gid not in old_groups:
            diff.groups_added.append({"group_id": gid, "members": sorted(new_groups[gid].members)})
        elif new_groups[gid].members != old_groups[gid].members:
            diff.groups_changed[gid] = sorted(new_groups[gid].members)
    diff.groups_removed = sorted(set(old_groups) - set(new_groups))
    for magnet, node in sorted(new.bindings.items()):
        if old.bindings.get(magnet) != node:
            diff.bindings[magnet] = node
    diff.bindings_removed = sorted(set(old.bindings) - set(new.bindings))
    if new.group_seq != old.group_seq:
        diff.group_seq = new.group_seq
    return diff


def apply_diff(snapshot_dict: dict, diff: dict) -> dict:
    """Patch a snapshot dict with a diff dict; returns the next snapshot."""
    out = json.loads(json.dumps(snapshot_dict))
    out["revision"] = diff["revision"]
    for node_id, changes in diff.get("nodes", {}).items():
        out["nodes"][node_id].update(changes)
    for link_id, changes in diff.get("links", {}).items():
        out["links"][link_id].update(changes)
    groups = {g["group_id"]: g for g in out.get("groups", [])}
    for gid in diff.get("groups_removed", []):
        groups.pop(gid, None)
    for added in diff.get("groups_added", []):
        groups[added["group_id"]] = {"group_id": added["group_id"], "members": list(added["members"])}
    for gid, members in diff.get("groups_changed", {}).items():
        groups[gid]["members"] = list(members)
    out["groups"] = [groups[gid] for gid in sorted(groups)]
    for magnet, node in diff.get("bindings", {}).items():
        out["bindings"][magnet] = node
    for magnet in diff.get("bindings_removed", []):
        out["bindings"].pop(magnet, None)
    if "group_seq" in diff:
        out["group_seq"] = diff["group_seq"]
    if "command" in diff:
        out["command_log"].append(diff["command"])
    return out


# --------------------------------------------------------------------------
# snapshots


def state_to_dict(state: VizState) -> dict:
    return {
        "revision": state.revision,
        "nodes": {node_id: _node_dict(view) for node_id, view in sorted(state.nodes.items())},
        "links": {link_id: _link_dict(view) for link_id, view in sorted(state.links.items())},
        "groups": [
            {"group_id": g.group_id, "members": sorted(g.members)}
            for g in sorted(state.groups, key=lambda g: g.group_id)
        ],
        "bindings": dict(sorted(state.bindings.items())),
        "group_seq": state.group_seq,
        "command_log": [command_to_dict(c) for c in state.command_log],
    }


def snapshot(state: VizState) -> bytes:
    return (json.dumps(state_to_dict(state), sort_keys=True, indent=2) + "\n").encode("utf-8")


def parse_snapshot(data: bytes | str) -> VizState:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed snapshot: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(raw, dict) or "revision" not in raw:
        raise SchemaError("snapshot must be an object with a revision")
    state = VizState(revision=int(raw["revision"]), group_seq=int(raw.get("group_seq", 0)))
    for node_id, nd in raw.get("nodes", {}).items():
        state.nodes[node_id] = NodeView(
            visible=bool(nd["visible"]),
            position=tuple(nd["position"]),
            scale=float(nd["scale"]),
            state_index=int(nd["state_index"]),
            highlighted=bool(nd["highlighted"]),
            annotation_visible=bool(nd["annotation_visible"]),
            child_visible=bool(nd["child_visible"]),
        )
    for link_id, ld in raw.get("links", {}).items():
        state.links[link_id] = LinkView(
            visible=bool(ld["visible"]),
            type_index=int(ld["type_index"]),
            direction=ld["direction"],
            width=float(ld["width"]),
        )
    for g in raw.get("groups", []):
        state.groups.append(Group(g["group_id"], set(g["members"])))
    state.bindings = dict(raw.get("bindings", {}))
    state.command_log = [parse_command(json.dumps(c)) for c in raw.get("command_log", [])]
    return state


# --------------------------------------------------------------------------
# validation (test harness support)


def validate_state(state: VizState, story: StoryDocument) -> list[str]:
    """All VizState invariants; returns human-readable violations."""
    problems: list[str] = []
    if state.revision < 0:
        problems.append(f"revision {state.revision} negative")
    if state.revision != len(state.command_log):
        problems.append(
            f"revision {state.revision} != command log length {len(state.command_log)}"
        )
    for node_id, view in state.nodes.items():
        spec = story.node(node_id)
        if not (SCALE_MIN <= view.scale <= SCALE_MAX):
            problems.append(f"node {node_id} scale {view.scale} outside clamp")
        if not (0 <= view.state_index < len(spec.states)):
            problems.append(f"node {node_id} state_index {view.state_index} out of range")
        if spec.kind == "secondary":
            want = _anchors_satisfied(story, state, node_id)
            if view.visible != want:
                problems.append(f"secondary {node_id} visibility {view.visible} != predicate {want}")
    for link_id, view in state.links.items():
        spec = story.link(link_id)
        both = state.node_visible(spec.source) and state.node_visible(spec.target)
        if view.visible and not both:
            problems.append(f"link {link_id} visible with hidden endpoint")
        if spec.reveal == "auto" and view.visible != both:
            problems.append(f"auto link {link_id} visibility {view.visible} != endpoints {both}")
        if not (WIDTH_MIN <= view.width <= WIDTH_MAX):
            problems.append(f"link {link_id} width {view.width} outside clamp")
        if not (0 <= view.type_index < len(spec.types)):
            problems.append(f"link {link_id} type_index {view.type_index} out of range")
    seen_members: set[str] = set()
    for g in state.groups:
        if len(g.members) < 2:
            problems.append(f"group {g.group_id} has {len(g.members)} members")
        for m in g.members:
            if not state.node_visible(m):
                problems.append(f"group {g.group_id} member {m} not visible")
            if m in seen_members:
                problems.append(f"node {m} in more than one group")
            seen_members.add(m)
    nodes_bound = list(state.bindings.values())
    if len(nodes_bound) != len(set(nodes_bound)):
        problems.append("bindings are not injective over nodes")
    return problems
