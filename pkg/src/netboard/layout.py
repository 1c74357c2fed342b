"""Deterministic scene layout: node discs, rings, hulls, and bubbles.

Primary nodes sit just above their magnets so projections never cover the
markers. Secondary nodes occupy golden-angle ring slots around the centroid
of their visible anchors, assigned in node-id order and nudged outward until
no two discs overlap, so identical states always place identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import MissingPose
from .geometry import clamp, clamp_point, disc_hull, dist
from .story import StoryDocument
from .vizstate import VizState

GOLDEN_ANGLE_DEG = 360.0 * (1.0 - 2.0 / (1.0 + math.sqrt(5.0)))  # ~137.5078
NODE_OFFSET_RADII = 1.5  # projection offset above the magnet, in magnet radii
RING_RADII = 2.5  # secondary ring radius, in magnet radii
CHILD_OFFSET_RADII = 3.0  # child bubble anchor offset, in magnet radii
CHILD_BUBBLE_RADII = 2.0
HULL_PADDING = 0.02
NUDGE_STEP_RADII = 0.25
MAX_NUDGES = 400


@dataclass
class SceneLayout:
    positions: dict[str, tuple[float, float]] = field(default_factory=dict)
    radii: dict[str, float] = field(default_factory=dict)
    links: list[dict] = field(default_factory=list)
    group_hulls: list[dict] = field(default_factory=list)
    child_bubbles: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    annotations: dict[str, tuple[float, float]] = field(default_factory=dict)


def _mean_carrier_radius(story: StoryDocument) -> float:
    carriers = [m for m in story.magnets if m.role == "node-carrier"] or list(story.magnets)
    if not carriers:
        return 0.02
    return sum(m.diameter for m in carriers) / len(carriers) / 2.0


def layout(
    state: VizState,
    story: StoryDocument,
    magnet_poses: dict[str, tuple[float, float]],
) -> SceneLayout:
    """Place every visible component; raises MissingPose for an unplaceable primary."""
    scene = SceneLayout()
    base_radius = _mean_carrier_radius(story)

    visible_primaries = [
        n for n in story.primary_nodes() if state.node_visible(n.node_id)
    ]
    for node in visible_primaries:
        magnet_id = None
        for m, n in state.bindings.items():
            if n == node.node_id:
                magnet_id = m
                break
        pose = magnet_poses.get(magnet_id) if magnet_id else None
        if pose is None:
            raise MissingPose(f"visible primary {node.node_id!r} has no magnet pose")
        radius = story.magnet(magnet_id).diameter / 2.0
        position = clamp_point((pose[0], pose[1] - NODE_OFFSET_RADII * radius))
        scene.positions[node.node_id] = position
        scene.radii[node.node_id] = radius * node.base_scale * state.nodes[node.node_id].scale

    placed = [
        (scene.positions[n], scene.radii[n]) for n in sorted(scene.positions)
    ]
    ring_index = 0
    for node in sorted(story.secondary_nodes(), key=lambda n: n.node_id):
        if not state.node_visible(node.node_id):
            continue
        anchors = [
            scene.positions[a]
            for a in node.anchors
            if a in scene.positions and state.node_visible(a)
        ]
        if not anchors:
            continue  # anchors visible but unplaced cannot happen for primaries
        cx = sum(p[0] for p in anchors) / len(anchors)
        cy = sum(p[1] for p in anchors) / len(anchors)
        radius = base_radius * node.base_scale * state.nodes[node.node_id].scale
        angle = math.radians((ring_index * GOLDEN_ANGLE_DEG) % 360.0)
        ring_index += 1
        ring_r = RING_RADII * base_radius
        position = None
        for attempt in range(MAX_NUDGES):
            r = ring_r + attempt * NUDGE_STEP_RADII * base_radius
            candidate = clamp_point((cx + r * math.cos(angle), cy + r * math.sin(angle)))
            if all(
                dist(candidate, other) >= radius + other_r
                for other, other_r in placed
            ):
                position = candidate
                break
        if position is None:
            position = clamp_point((cx + ring_r * math.cos(angle), cy + ring_r * math.sin(angle)))
        scene.positions[node.node_id] = position
        scene.radii[node.node_id] = radius
        placed.append((position, radius))

    for link in story.links:
        view = state.links[link.link_id]
        if not view.visible:
            continue
        if link.source not in scene.positions or link.target not in scene.positions:
            continue
        scene.links.append(
            {
                "link_id": link.link_id,
                "source": link.source,
                "target": link.target,
                "from": scene.positions[link.source],
                "to": scene.positions[link.target],
                "width": link.base_width * view.width,
                "type_index": view.type_index,
                "direction": view.direction,
            }
        )

    for group in sorted(state.groups, key=lambda g: g.group_id):
        discs = [
            (scene.positions[m][0], scene.positions[m][1], scene.radii[m] + HULL_PADDING)
            for m in sorted(group.members)
            if m in scene.positions
        ]
        if len(discs) < 2:
            continue
        scene.group_hulls.append({"group_id": group.group_id, "points": disc_hull(discs)})

    for node_id in sorted(scene.positions):
        view = state.nodes[node_id]
        x, y = scene.positions[node_id]
        if view.child_visible and story.node(node_id).child_network:
            bubble_r = CHILD_BUBBLE_RADII * base_radius
            bx = clamp(x + CHILD_OFFSET_RADII * scene.radii[node_id] + bubble_r, bubble_r, 1.0 - bubble_r)
            by = clamp(y, bubble_r, 1.0 - bubble_r)
            scene.child_bubbles[node_id] = (bx, by, bubble_r)
        if view.annotation_visible and story.node(node_id).annotation is not None:
            scene.annotations[node_id] = (x, y - scene.radii[node_id] - HULL_PADDING)

    return scene


def positioned_state(
    state: VizState,
    story: StoryDocument,
    magnet_poses: dict[str, tuple[float, float]],
) -> tuple[VizState, SceneLayout]:
    """Copy of the state with node positions replaced by layout placements."""
    scene = layout(state, story, magnet_poses)
    placed = state.clone()
    for node_id, position in scene.positions.items():
        placed.nodes[node_id].position = position
    return placed, scene


def poses_from_state(state: VizState, story: StoryDocument) -> dict[str, tuple[float, float]]:
    """Reconstruct magnet poses from commanded node positions.

    The stored node position is the magnet center at its last rest point, so
    offline rendering (replay output, figures) can lay out a snapshot without
    a live tracking feed.
    """
    poses: dict[str, tuple[float, float]] = {}
    for magnet_id, node_id in state.bindings.items():
        if node_id in state.nodes:
            poses[magnet_id] = state.nodes[node_id].position
    return poses
