"""Regenerates the frontend test fixtures from the engine.

Produces, under frontend/test/data/:
  alliance.story.json        the canonical demo story (same file the engine ships)
  golden_session.jsonl       the exact message stream a session broadcasts for
                             the golden scenario (hello, snapshot, diffs)
  golden_scene_reference.json the scene description the UI must render for the
                             final revision, computed from the engine's layout

Run from the repository root:  python3 frontend/tools/export_fixtures.py
"""
from __future__ import annotations

import json
from pathlib import Path

from netboard.command_sets import BUILTIN_SETS
from netboard.layout import layout, poses_from_state
from netboard.pipeline import PresenterPipeline
from netboard.scenarios import demo_story, golden_script
from netboard.scripting import script_scenario
from netboard.story import serialize_story, story_to_dict
from netboard.vizstate import state_to_dict

OUT = Path(__file__).resolve().parent.parent / "test" / "data"


def scene_description(state, story) -> dict:
    """Mirror of the UI's renderState structure, computed engine-side."""
    scene = layout(state, story, poses_from_state(state, story))
    nodes = []
    for node_id in sorted(scene.positions):
        spec = story.node(node_id)
        view = state.nodes[node_id]
        node_state = spec.states[view.state_index]
        nodes.append(
            {
                "id": node_id,
                "x": scene.positions[node_id][0],
                "y": scene.positions[node_id][1],
                "radius": scene.radii[node_id],
                "label": spec.label,
                "fill": node_state.fill,
                "state_label": node_state.label,
                "highlighted": view.highlighted,
                "kind": spec.kind,
            }
        )
    links = []
    for link in sorted(story.links, key=lambda l: l.link_id):
        view = state.links[link.link_id]
        if not view.visible:
            continue
        if link.source not in scene.positions or link.target not in scene.positions:
            continue
        link_type = link.types[view.type_index]
        links.append(
            {
                "id": link.link_id,
                "source": link.source,
                "target": link.target,
                "x1": scene.positions[link.source][0],
                "y1": scene.positions[link.source][1],
                "x2": scene.positions[link.target][0],
                "y2": scene.positions[link.target][1],
                "width": link.base_width * view.width,
                "stroke": link_type.stroke,
                "type_label": link_type.label,
                "arrow": view.direction,
            }
        )
    groups = []
    styles = list(story.group_styles)
    for index, hull in enumerate(scene.group_hulls):
        style = styles[index % len(styles)] if styles else None
        groups.append(
            {
                "id": hull["group_id"],
                "points": [list(p) for p in hull["points"]],
                "label": style.label if style else "",
                "fill": style.fill if style else "",
            }
        )
    annotations = [
        {
            "node": node_id,
            "x": scene.annotations[node_id][0],
            "y": scene.annotations[node_id][1],
            "text": story.node(node_id).annotation.text,
        }
        for node_id in sorted(scene.annotations)
    ]
    bubbles = []
    for node_id in sorted(scene.child_bubbles):
        bx, by, br = scene.child_bubbles[node_id]
        child = story.child(story.node(node_id).child_network)
        import math

        count = max(1, len(child.nodes))
        members = []
        spots = {}
        for k, cn in enumerate(child.nodes):
            theta = 2 * math.pi * k / count
            spot = (bx + 0.5 * br * math.cos(theta), by + 0.5 * br * math.sin(theta))
            spots[cn.node_id] = spot
            members.append({"id": cn.node_id, "label": cn.label, "x": spot[0], "y": spot[1]})
        bubble_links = [
            {
                "x1": spots[cl.source][0], "y1": spots[cl.source][1],
                "x2": spots[cl.target][0], "y2": spots[cl.target][1],
            }
            for cl in child.links
        ]
        bubbles.append({"node": node_id, "x": bx, "y": by, "r": br,
                        "members": members, "links": bubble_links})
    bound_nodes = set(state.bindings.values())
    slots = [
        {
            "node": slot.node_id,
            "label": story.node(slot.node_id).label,
            "x": slot.center[0],
            "y": slot.center[1],
            "r": slot.radius,
            "bound": slot.node_id in bound_nodes,
        }
        for slot in sorted(story.registration_slots, key=lambda s: s.node_id)
    ]
    return {
        "revision": state.revision,
        "nodes": nodes,
        "links": links,
        "groups": groups,
        "annotations": annotations,
        "child_bubbles": bubbles,
        "slots": slots,
    }


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    story = demo_story()
    (OUT / "alliance.story.json").write_bytes(serialize_story(story))

    frames = script_scenario(golden_script(), list(story.magnets))
    pipeline = PresenterPipeline(story, BUILTIN_SETS["default"])
    messages = [
        {"type": "hello", "schema_version": 1, "story_id": story.story_id},
        {"type": "state", "mode": "snapshot", "data": state_to_dict(pipeline.state)},
    ]
    for frame in frames:
        step = pipeline.feed_frame(frame)
        for diff in step.diffs:
            messages.append({"type": "state", "mode": "diff", "data": diff.to_dict()})
    step = pipeline.finish()
    for diff in step.diffs:
        messages.append({"type": "state", "mode": "diff", "data": diff.to_dict()})

    with (OUT / "golden_session.jsonl").open("w", encoding="utf-8") as fh:
        for message in messages:
            fh.write(json.dumps(message, sort_keys=True) + "\n")

    reference = scene_description(pipeline.state, story)
    (OUT / "golden_scene_reference.json").write_text(
        json.dumps(reference, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(messages)} session messages and the scene reference to {OUT}")


if __name__ == "__main__":
    main()
