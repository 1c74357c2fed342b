"""Pre-registered network story documents and the physical magnet roster.

A story file is a JSON document (``*.story.json``) with a ``schema_version``
field. Parsing canonicalizes it: entity lists are sorted by id, optional
fields absent from the input stay absent from the output, and serialization
is deterministic (sorted keys, no float drift), so
``parse_story(serialize_story(doc)) == doc`` for every valid document.

All geometry in a story is stored in normalized board units (x, y in [0, 1],
origin top-left, x along the long edge); physical centimeters appear only in
the ``board`` field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, ReferentialError, SchemaError

SCHEMA_VERSION = 1

MAGNET_ROLES = ("node-carrier", "widget")
NODE_KINDS = ("primary", "secondary")
ANCHOR_MODES = ("all", "any")
LINK_REVEALS = ("manual", "auto")
LINK_DIRECTIONS = ("none", "forward", "reverse")

# Default board regions (x0, y0, x1, y1): registration strip along the top
# edge, storyboard below it. Stories may override via the "zones" field.
DEFAULT_REGISTRATION_ZONE = (0.0, 0.0, 1.0, 0.15)
DEFAULT_STORYBOARD_ZONE = (0.0, 0.15, 1.0, 1.0)


@dataclass(frozen=True)
class MagnetSpec:
    """A double-sided magnet: one fiducial id per face."""

    magnet_id: str
    side_a_marker: int
    side_b_marker: int
    diameter: float  # fraction of board width
    role: str = "node-carrier"

    def marker_side(self, fiducial_id: int) -> str | None:
        if fiducial_id == self.side_a_marker:
            return "a"
        if fiducial_id == self.side_b_marker:
            return "b"
        return None

    def side_marker(self, side: str) -> int:
        return self.side_a_marker if side == "a" else self.side_b_marker


@dataclass(frozen=True)
class NodeState:
    label: str
    fill: str = ""
    icon: str = ""


@dataclass(frozen=True)
class Annotation:
    text: str
    image: str = ""


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    label: str
    kind: str
    states: tuple[NodeState, ...]
    initial_state_index: int = 0
    annotation: Annotation | None = None
    child_network: str = ""
    anchors: tuple[str, ...] = ()
    anchor_mode: str = "all"  # secondary appears when ALL/ANY anchors visible
    base_scale: float = 1.0


@dataclass(frozen=True)
class LinkType:
    label: str
    stroke: str = ""


@dataclass(frozen=True)
class LinkSpec:
    link_id: str
    source: str
    target: str
    reveal: str = "manual"
    types: tuple[LinkType, ...] = (LinkType("default"),)
    initial_type_index: int = 0
    directed: str = "none"
    base_width: float = 1.0

    def pair(self) -> tuple[str, str]:
        return tuple(sorted((self.source, self.target)))  # type: ignore[return-value]


@dataclass(frozen=True)
class ChildNode:
    node_id: str
    label: str
    style: str = ""


@dataclass(frozen=True)
class ChildLink:
    source: str
    target: str
    style: str = ""


@dataclass(frozen=True)
class ChildNetwork:
    child_id: str
    nodes: tuple[ChildNode, ...]
    links: tuple[ChildLink, ...]


@dataclass(frozen=True)
class GroupStyle:
    group_id: str
    label: str = ""
    fill: str = ""
    border: str = ""


@dataclass(frozen=True)
class RegistrationSlot:
    node_id: str
    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class StoryDocument:
    story_id: str
    board: tuple[float, float]  # (width_cm, height_cm)
    magnets: tuple[MagnetSpec, ...]
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkSpec, ...]
    child_networks: tuple[ChildNetwork, ...] = ()
    group_styles: tuple[GroupStyle, ...] = ()
    command_set_ref: str = "default"
    registration_slots: tuple[RegistrationSlot, ...] = ()
    registration_zone: tuple[float, float, float, float] = DEFAULT_REGISTRATION_ZONE
    storyboard_zone: tuple[float, float, float, float] = DEFAULT_STORYBOARD_ZONE

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise ReferentialError(f"unknown node id {node_id!r}") from None

    def magnet(self, magnet_id: str) -> MagnetSpec:
        try:
            return self._magnet_index[magnet_id]
        except KeyError:
            raise ReferentialError(f"unknown magnet id {magnet_id!r}") from None

    def link_between(self, a: str, b: str) -> LinkSpec | None:
        return self._pair_index.get(tuple(sorted((a, b))))

    def link(self, link_id: str) -> LinkSpec:
        try:
            return self._link_index[link_id]
        except KeyError:
            raise ReferentialError(f"unknown link id {link_id!r}") from None

    def child(self, child_id: str) -> ChildNetwork:
        try:
            return self._child_index[child_id]
        except KeyError:
            raise ReferentialError(f"unknown child network {child_id!r}") from None

    def magnet_for_marker(self, fiducial_id: int) -> MagnetSpec | None:
        return self._marker_index.get(fiducial_id)

    def slot_for_node(self, node_id: str) -> RegistrationSlot | None:
        return self._slot_index.get(node_id)

    def primary_nodes(self) -> tuple[NodeSpec, ...]:
        return tuple(n for n in self.nodes if n.kind == "primary")

    def secondary_nodes(self) -> tuple[NodeSpec, ...]:
        return tuple(n for n in self.nodes if n.kind == "secondary")

    def __post_init__(self):
        object.__setattr__(self, "_node_index", {n.node_id: n for n in self.nodes})
        object.__setattr__(self, "_magnet_index", {m.magnet_id: m for m in self.magnets})
        object.__setattr__(self, "_link_index", {l.link_id: l for l in self.links})
        object.__setattr__(self, "_pair_index", {l.pair(): l for l in self.links})
        object.__setattr__(self, "_child_index", {c.child_id: c for c in self.child_networks})
        object.__setattr__(self, "_slot_index", {s.node_id: s for s in self.registration_slots})
        marker_index: dict[int, MagnetSpec] = {}
        for m in self.magnets:
            marker_index[m.side_a_marker] = m
            marker_index[m.side_b_marker] = m
        object.__setattr__(self, "_marker_index", marker_index)


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.subject}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def add(self, code: str, subject: str, detail: str) -> None:
        self.violations.append(Violation(code, subject, detail))

    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_records(self) -> list[dict]:
        return [
            {"code": v.code, "subject": v.subject, "detail": v.detail}
            for v in self.violations
        ]

    def __str__(self) -> str:
        if self.ok():
            return "story OK: no violations"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


# --------------------------------------------------------------------------
# parsing


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = data[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{where}: field {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _optional(data: dict, key: str, kind, default, where: str):
    if key not in data or data[key] is None:
        return default
    return _require(data, key, kind, where)


def _xy(value, where: str) -> tuple[float, float]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise SchemaError(f"{where}: expected [x, y] pair")
    return (float(value[0]), float(value[1]))


def _rect(value, where: str) -> tuple[float, float, float, float]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 4
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise SchemaError(f"{where}: expected [x0, y0, x1, y1] rectangle")
    return tuple(float(c) for c in value)  # type: ignore[return-value]


def _parse_magnet(data: dict) -> MagnetSpec:
    where = f"magnet {data.get('magnet_id', '?')}"
    return MagnetSpec(
        magnet_id=_require(data, "magnet_id", str, where),
        side_a_marker=_require(data, "side_a_marker", int, where),
        side_b_marker=_require(data, "side_b_marker", int, where),
        diameter=_require(data, "diameter", float, where),
        role=_optional(data, "role", str, "node-carrier", where),
    )


def _parse_node(data: dict) -> NodeSpec:
    where = f"node {data.get('node_id', '?')}"
    states_raw = _require(data, "states", list, where)
    states = tuple(
        NodeState(
            label=_require(s, "label", str, f"{where} state"),
            fill=_optional(s, "fill", str, "", where),
            icon=_optional(s, "icon", str, "", where),
        )
        for s in states_raw
    )
    annotation = None
    if data.get("annotation") is not None:
        ann = data["annotation"]
        if not isinstance(ann, dict):
            raise SchemaError(f"{where}: annotation must be an object")
        annotation = Annotation(
            text=_require(ann, "text", str, f"{where} annotation"),
            image=_optional(ann, "image", str, "", where),
        )
    anchors = _optional(data, "anchors", list, [], where)
    if not all(isinstance(a, str) for a in anchors):
        raise SchemaError(f"{where}: anchors must be node ids")
    return NodeSpec(
        node_id=_require(data, "node_id", str, where),
        label=_require(data, "label", str, where),
        kind=_require(data, "kind", str, where),
        states=states,
        initial_state_index=_optional(data, "initial_state_index", int, 0, where),
        annotation=annotation,
        child_network=_optional(data, "child_network", str, "", where),
        anchors=tuple(anchors),
        anchor_mode=_optional(data, "anchor_mode", str, "all", where),
        base_scale=_optional(data, "base_scale", float, 1.0, where),
    )


def _parse_link(data: dict) -> LinkSpec:
    where = f"link {data.get('link_id', '?')}"
    types_raw = _optional(data, "types", list, [{"label": "default"}], where)
    types = tuple(
        LinkType(
            label=_require(t, "label", str, f"{where} type"),
            stroke=_optional(t, "stroke", str, "", where),
        )
        for t in types_raw
    )
    return LinkSpec(
        link_id=_require(data, "link_id", str, where),
        source=_require(data, "source", str, where),
        target=_require(data, "target", str, where),
        reveal=_optional(data, "reveal", str, "manual", where),
        types=types,
        initial_type_index=_optional(data, "initial_type_index", int, 0, where),
        directed=_optional(data, "directed", str, "none", where),
        base_width=_optional(data, "base_width", float, 1.0, where),
    )


def _parse_child(data: dict) -> ChildNetwork:
    where = f"child network {data.get('child_id', '?')}"
    nodes = tuple(
        ChildNode(
            node_id=_require(n, "node_id", str, where),
            label=_require(n, "label", str, where),
            style=_optional(n, "style", str, "", where),
        )
        for n in _require(data, "nodes", list, where)
    )
    links = tuple(
        ChildLink(
            source=_require(l, "source", str, where),
            target=_require(l, "target", str, where),
            style=_optional(l, "style", str, "", where),
        )
        for l in _require(data, "links", list, where)
    )
    return ChildNetwork(child_id=_require(data, "child_id", str, where), nodes=nodes, links=links)


def parse_story(text: bytes | str, check: bool = True) -> StoryDocument:
    """Parse a story document; raises on syntax, schema, or referential faults."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed story document: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise SchemaError("story document must be a JSON object")
    version = _require(data, "schema_version", int, "story")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}, expected {SCHEMA_VERSION}")

    board_raw = _require(data, "board", dict, "story")
    board = (
        _require(board_raw, "width_cm", float, "board"),
        _require(board_raw, "height_cm", float, "board"),
    )

    magnets = sorted(
        (_parse_magnet(m) for m in _require(data, "magnets", list, "story")),
        key=lambda m: m.magnet_id,
    )
    nodes = sorted(
        (_parse_node(n) for n in _require(data, "nodes", list, "story")),
        key=lambda n: n.node_id,
    )
    links = sorted(
        (_parse_link(l) for l in _optional(data, "links", list, [], "story")),
        key=lambda l: l.link_id,
    )
    children = sorted(
        (_parse_child(c) for c in _optional(data, "child_networks", list, [], "story")),
        key=lambda c: c.child_id,
    )
    group_styles = sorted(
        (
            GroupStyle(
                group_id=_require(g, "group_id", str, "group style"),
                label=_optional(g, "label", str, "", "group style"),
                fill=_optional(g, "fill", str, "", "group style"),
                border=_optional(g, "border", str, "", "group style"),
            )
            for g in _optional(data, "group_styles", list, [], "story")
        ),
        key=lambda g: g.group_id,
    )
    slots = sorted(
        (
            RegistrationSlot(
                node_id=_require(s, "node_id", str, "registration slot"),
                center=_xy(_require(s, "center", list, "registration slot"), "slot center"),
                radius=_require(s, "radius", float, "registration slot"),
            )
            for s in _optional(data, "registration_slots", list, [], "story")
        ),
        key=lambda s: s.node_id,
    )

    zones = data.get("zones") or {}
    if not isinstance(zones, dict):
        raise SchemaError("story: zones must be an object")
    registration_zone = (
        _rect(zones["registration"], "zones.registration")
        if "registration" in zones
        else DEFAULT_REGISTRATION_ZONE
    )
    storyboard_zone = (
        _rect(zones["storyboard"], "zones.storyboard")
        if "storyboard" in zones
        else DEFAULT_STORYBOARD_ZONE
    )

    doc = StoryDocument(
        story_id=_require(data, "story_id", str, "story"),
        board=board,
        magnets=tuple(magnets),
        nodes=tuple(nodes),
        links=tuple(links),
        child_networks=tuple(children),
        group_styles=tuple(group_styles),
        command_set_ref=_optional(data, "command_set", str, "default", "story"),
        registration_slots=tuple(slots),
        registration_zone=registration_zone,
        storyboard_zone=storyboard_zone,
    )
    if check:
        report = validate_story(doc)
        if not report.ok():
            first = report.violations[0]
            raise ReferentialError(str(first))
    return doc


# --------------------------------------------------------------------------
# validation


def _rects_overlap(a, b) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def validate_story(doc: StoryDocument) -> ValidationReport:
    """Check every document invariant; violations are data, not exceptions."""
    report = ValidationReport()
    node_ids = {n.node_id for n in doc.nodes}
    kinds = {n.node_id: n.kind for n in doc.nodes}

    if doc.board[0] <= 0 or doc.board[1] <= 0:
        report.add("BAD_BOARD", doc.story_id, f"board dims must be positive, got {doc.board}")

    seen_magnets: set[str] = set()
    seen_markers: dict[int, str] = {}
    for m in doc.magnets:
        if m.magnet_id in seen_magnets:
            report.add("DUP_MAGNET_ID", m.magnet_id, "magnet id used twice")
        seen_magnets.add(m.magnet_id)
        if m.side_a_marker == m.side_b_marker:
            report.add("SAME_SIDE_MARKERS", m.magnet_id, f"both sides carry fiducial {m.side_a_marker}")
        for marker in (m.side_a_marker, m.side_b_marker):
            if marker in seen_markers:
                report.add(
                    "DUP_FIDUCIAL",
                    m.magnet_id,
                    f"fiducial {marker} already used by magnet {seen_markers[marker]}",
                )
            else:
                seen_markers[marker] = m.magnet_id
        if not (0.0 < m.diameter < 0.25):
            report.add("BAD_DIAMETER", m.magnet_id, f"diameter {m.diameter} outside (0, 0.25)")
        if m.role not in MAGNET_ROLES:
            report.add("BAD_ROLE", m.magnet_id, f"role {m.role!r} not in {MAGNET_ROLES}")

    seen_nodes: set[str] = set()
    for n in doc.nodes:
        if n.node_id in seen_nodes:
            report.add("DUP_NODE_ID", n.node_id, "node id used twice")
        seen_nodes.add(n.node_id)
        if n.kind not in NODE_KINDS:
            report.add("BAD_KIND", n.node_id, f"kind {n.kind!r} not in {NODE_KINDS}")
        if not n.states:
            report.add("EMPTY_STATES", n.node_id, "states list is empty")
        elif not (0 <= n.initial_state_index < len(n.states)):
            report.add(
                "BAD_STATE_INDEX",
                n.node_id,
                f"initial_state_index {n.initial_state_index} outside [0, {len(n.states)})",
            )
        if n.kind == "primary" and n.anchors:
            report.add("ANCHOR_ON_PRIMARY", n.node_id, "primary nodes may not declare anchors")
        if n.kind == "secondary" and not n.anchors:
            report.add("NO_ANCHORS", n.node_id, "secondary node needs at least one anchor")
        for a in n.anchors:
            if a not in node_ids:
                report.add("UNKNOWN_ANCHOR", n.node_id, f"anchor {a!r} does not exist")
            elif kinds[a] != "primary":
                report.add("ANCHOR_TO_SECONDARY", n.node_id, f"anchor {a!r} is not a primary node")
        if n.anchor_mode not in ANCHOR_MODES:
            report.add("BAD_ANCHOR_MODE", n.node_id, f"anchor_mode {n.anchor_mode!r} not in {ANCHOR_MODES}")
        if n.base_scale <= 0:
            report.add("BAD_SCALE", n.node_id, f"base_scale {n.base_scale} must be positive")
        if n.child_network and n.child_network not in {c.child_id for c in doc.child_networks}:
            report.add("UNKNOWN_CHILD_REF", n.node_id, f"child network {n.child_network!r} does not exist")

    seen_links: set[str] = set()
    seen_pairs: dict[tuple[str, str], str] = {}
    for l in doc.links:
        if l.link_id in seen_links:
            report.add("DUP_LINK_ID", l.link_id, "link id used twice")
        seen_links.add(l.link_id)
        if l.source == l.target:
            report.add("SELF_LINK", l.link_id, f"source equals target ({l.source!r})")
        for endpoint in (l.source, l.target):
            if endpoint not in node_ids:
                report.add("UNKNOWN_LINK_ENDPOINT", l.link_id, f"endpoint {endpoint!r} does not exist")
        pair = l.pair()
        if pair in seen_pairs:
            report.add("DUP_LINK_PAIR", l.link_id, f"pair {pair} already linked by {seen_pairs[pair]}")
        else:
            seen_pairs[pair] = l.link_id
        if not l.types:
            report.add("EMPTY_TYPES", l.link_id, "types list is empty")
        elif not (0 <= l.initial_type_index < len(l.types)):
            report.add(
                "BAD_TYPE_INDEX",
                l.link_id,
                f"initial_type_index {l.initial_type_index} outside [0, {len(l.types)})",
            )
        if l.reveal not in LINK_REVEALS:
            report.add("BAD_REVEAL", l.link_id, f"reveal {l.reveal!r} not in {LINK_REVEALS}")
        if l.directed not in LINK_DIRECTIONS:
            report.add("BAD_DIRECTION", l.link_id, f"directed {l.directed!r} not in {LINK_DIRECTIONS}")
        if l.base_width <= 0:
            report.add("BAD_WIDTH", l.link_id, f"base_width {l.base_width} must be positive")

    for c in doc.child_networks:
        child_ids = {n.node_id for n in c.nodes}
        for cl in c.links:
            for endpoint in (cl.source, cl.target):
                if endpoint not in child_ids:
                    report.add(
                        "CHILD_LINK_ENDPOINT",
                        c.child_id,
                        f"child link endpoint {endpoint!r} not in child node list",
                    )

    slot_nodes: set[str] = set()
    for s in doc.registration_slots:
        if s.node_id not in node_ids:
            report.add("SLOT_UNKNOWN_NODE", s.node_id, "slot references missing node")
        elif kinds[s.node_id] != "primary":
            report.add("SLOT_SECONDARY_NODE", s.node_id, "slots may only reference primary nodes")
        if s.node_id in slot_nodes:
            report.add("SLOT_DUPLICATE_NODE", s.node_id, "node has more than one slot")
        slot_nodes.add(s.node_id)
        if not (0.0 <= s.center[0] <= 1.0 and 0.0 <= s.center[1] <= 1.0):
            report.add("BAD_COORD", s.node_id, f"slot center {s.center} outside [0,1]^2")
        if s.radius <= 0:
            report.add("BAD_SLOT_RADIUS", s.node_id, f"slot radius {s.radius} must be positive")
    for n in doc.nodes:
        if n.kind == "primary" and n.node_id not in slot_nodes:
            report.add("MISSING_SLOT", n.node_id, "primary node has no registration slot")

    if _rects_overlap(doc.registration_zone, doc.storyboard_zone):
        report.add("ZONES_OVERLAP", doc.story_id, "registration and storyboard zones intersect")

    seen_groups: set[str] = set()
    for g in doc.group_styles:
        if g.group_id in seen_groups:
            report.add("DUP_GROUP_STYLE", g.group_id, "group style id used twice")
        seen_groups.add(g.group_id)

    return report


# --------------------------------------------------------------------------
# serialization


def _magnet_dict(m: MagnetSpec) -> dict:
    return {
        "magnet_id": m.magnet_id,
        "side_a_marker": m.side_a_marker,
        "side_b_marker": m.side_b_marker,
        "diameter": m.diameter,
        "role": m.role,
    }


def _node_dict(n: NodeSpec) -> dict:
    out: dict = {
        "node_id": n.node_id,
        "label": n.label,
        "kind": n.kind,
        "states": [
            {"label": s.label, **({"fill": s.fill} if s.fill else {}), **({"icon": s.icon} if s.icon else {})}
            for s in n.states
        ],
        "initial_state_index": n.initial_state_index,
        "base_scale": n.base_scale,
    }
    if n.annotation is not None:
        ann = {"text": n.annotation.text}
        if n.annotation.image:
            ann["image"] = n.annotation.image
        out["annotation"] = ann
    if n.child_network:
        out["child_network"] = n.child_network
    if n.anchors:
        out["anchors"] = list(n.anchors)
        out["anchor_mode"] = n.anchor_mode
    return out


def _link_dict(l: LinkSpec) -> dict:
    return {
        "link_id": l.link_id,
        "source": l.source,
        "target": l.target,
        "reveal": l.reveal,
        "types": [
            {"label": t.label, **({"stroke": t.stroke} if t.stroke else {})} for t in l.types
        ],
        "initial_type_index": l.initial_type_index,
        "directed": l.directed,
        "base_width": l.base_width,
    }


def story_to_dict(doc: StoryDocument) -> dict:
    out: dict = {
        "schema_version": SCHEMA_VERSION,
        "story_id": doc.story_id,
        "board": {"width_cm": doc.board[0], "height_cm": doc.board[1]},
        "command_set": doc.command_set_ref,
        "magnets": [_magnet_dict(m) for m in doc.magnets],
        "nodes": [_node_dict(n) for n in doc.nodes],
        "links": [_link_dict(l) for l in doc.links],
        "zones": {
            "registration": list(doc.registration_zone),
            "storyboard": list(doc.storyboard_zone),
        },
    }
    if doc.child_networks:
        out["child_networks"] = [
            {
                "child_id": c.child_id,
                "nodes": [
                    {"node_id": n.node_id, "label": n.label, **({"style": n.style} if n.style else {})}
                    for n in c.nodes
                ],
                "links": [
                    {"source": l.source, "target": l.target, **({"style": l.style} if l.style else {})}
                    for l in c.links
                ],
            }
            for c in doc.child_networks
        ]
    if doc.group_styles:
        out["group_styles"] = [
            {
                "group_id": g.group_id,
                **({"label": g.label} if g.label else {}),
                **({"fill": g.fill} if g.fill else {}),
                **({"border": g.border} if g.border else {}),
            }
            for g in doc.group_styles
        ]
    if doc.registration_slots:
        out["registration_slots"] = [
            {"node_id": s.node_id, "center": list(s.center), "radius": s.radius}
            for s in doc.registration_slots
        ]
    return out


def serialize_story(doc: StoryDocument) -> bytes:
    """Canonical bytes: sorted keys, absent optionals omitted, trailing newline."""
    return (json.dumps(story_to_dict(doc), sort_keys=True, indent=2) + "\n").encode("utf-8")
