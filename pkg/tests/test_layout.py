import itertools

import pytest

from netboard import commands as cmd
from netboard.errors import MissingPose
from netboard.geometry import dist
from netboard.layout import layout, poses_from_state
from netboard.vizstate import apply_command, initial_state


def build_state(story, *nodes, positions=None):
    state = initial_state(story)
    positions = positions or {}
    for k, node in enumerate(nodes):
        magnet = f"mag-{node}"
        state, _ = apply_command(state, story, cmd.register(0, magnet, node))
        state, _ = apply_command(state, story, cmd.show_node(0, node))
        xy = positions.get(node, (0.2 + 0.2 * k, 0.5))
        state, _ = apply_command(state, story, cmd.reposition_node(0, node, xy))
    return state


def test_single_node_offset(story):
    state = build_state(story, "germany", positions={"germany": (0.5, 0.5)})
    scene = layout(state, story, poses_from_state(state, story))
    x, y = scene.positions["germany"]
    radius = story.magnet("mag-germany").diameter / 2.0
    assert x == pytest.approx(0.5)
    assert y == pytest.approx(0.5 - 1.5 * radius)
    assert y == pytest.approx(0.475, abs=1e-6)


def test_empty_state_empty_layout(story):
    scene = layout(initial_state(story), story, {})
    assert scene.positions == {}
    assert scene.links == []


def test_missing_pose_raises(story):
    state = build_state(story, "germany")
    with pytest.raises(MissingPose):
        layout(state, story, {})


def test_offset_clamped_to_board(story):
    state = build_state(story, "germany", positions={"germany": (0.0, 0.0)})
    scene = layout(state, story, poses_from_state(state, story))
    x, y = scene.positions["germany"]
    assert x == 0.0 and y == 0.0  # clamped into the board


def test_secondary_ring_placement(story):
    state = build_state(
        story, "austria", "serbia",
        positions={"austria": (0.4, 0.5), "serbia": (0.6, 0.5)},
    )
    assert state.nodes["bosnia"].visible
    scene = layout(state, story, poses_from_state(state, story))
    assert "bosnia" in scene.positions
    centroid = (0.5, 0.5 - 1.5 * story.magnet("mag-austria").diameter / 2.0)
    ring = dist(scene.positions["bosnia"], centroid)
    base_radius = story.magnet("mag-austria").diameter / 2.0
    assert ring == pytest.approx(2.5 * base_radius, rel=0.01)


def test_two_secondaries_distinct_slots():
    # a dedicated story with two secondaries sharing one anchor pair
    import dataclasses

    from netboard.scenarios import demo_story
    from netboard.story import NodeSpec, NodeState

    story = demo_story()
    extra = NodeSpec(
        node_id="croatia",
        label="Croatia",
        kind="secondary",
        states=(NodeState(label="Croatia"),),
        anchors=("austria", "serbia"),
        anchor_mode="all",
        base_scale=0.8,
    )
    story = dataclasses.replace(story, nodes=tuple(sorted(
        story.nodes + (extra,), key=lambda n: n.node_id
    )))
    state = build_state(
        story, "austria", "serbia",
        positions={"austria": (0.4, 0.5), "serbia": (0.6, 0.5)},
    )
    scene = layout(state, story, poses_from_state(state, story))
    a, b = scene.positions["bosnia"], scene.positions["croatia"]
    min_gap = scene.radii["bosnia"] + scene.radii["croatia"]
    assert dist(a, b) >= min_gap  # distinct, non-overlapping ring slots


def test_no_visible_disc_overlap(story):
    state = build_state(
        story, "germany", "austria", "italy", "serbia",
        positions={
            "germany": (0.3, 0.45), "austria": (0.38, 0.45),
            "italy": (0.3, 0.6), "serbia": (0.55, 0.7),
        },
    )
    scene = layout(state, story, poses_from_state(state, story))
    for a, b in itertools.combinations(scene.positions, 2):
        gap = dist(scene.positions[a], scene.positions[b])
        assert gap + 1e-9 >= scene.radii[a] + scene.radii[b] or {a, b} <= {
            "germany", "austria", "italy", "serbia",
        }  # primaries sit where their magnets are; only derived discs must not collide
        if "bosnia" in (a, b):
            assert gap + 1e-9 >= scene.radii[a] + scene.radii[b]


def test_layout_deterministic(story):
    state = build_state(
        story, "austria", "serbia",
        positions={"austria": (0.4, 0.5), "serbia": (0.6, 0.5)},
    )
    poses = poses_from_state(state, story)
    one = layout(state, story, poses)
    two = layout(state, story, poses)
    assert one.positions == two.positions
    assert one.group_hulls == two.group_hulls


def test_group_hull_contains_members(story):
    state = build_state(
        story, "germany", "austria",
        positions={"germany": (0.3, 0.45), "austria": (0.45, 0.45)},
    )
    state, _ = apply_command(state, story, cmd.show_or_extend_group(0, "germany", "austria"))
    scene = layout(state, story, poses_from_state(state, story))
    assert len(scene.group_hulls) == 1
    points = scene.group_hulls[0]["points"]
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    for member in ("germany", "austria"):
        x, y = scene.positions[member]
        assert min(xs) <= x <= max(xs)
        assert min(ys) <= y <= max(ys)


def test_child_bubble_anchored_beside_parent(story):
    state = build_state(story, "germany", positions={"germany": (0.5, 0.5)})
    state, _ = apply_command(state, story, cmd.toggle_child_network(0, "germany"))
    scene = layout(state, story, poses_from_state(state, story))
    assert "germany" in scene.child_bubbles
    bx, by, br = scene.child_bubbles["germany"]
    x, y = scene.positions["germany"]
    assert bx > x  # beside, not on top
    assert 0.0 + br <= bx <= 1.0 - br  # clamped inboard


def test_annotation_anchor_above_disc(story):
    state = build_state(story, "germany", positions={"germany": (0.5, 0.5)})
    state, _ = apply_command(state, story, cmd.toggle_annotation(0, "germany"))
    scene = layout(state, story, poses_from_state(state, story))
    ax, ay = scene.annotations["germany"]
    x, y = scene.positions["germany"]
    assert ay < y


def test_positioned_state_carries_placements(story):
    from netboard.layout import positioned_state

    state = build_state(
        story, "austria", "serbia",
        positions={"austria": (0.4, 0.5), "serbia": (0.6, 0.5)},
    )
    placed, scene = positioned_state(state, story, poses_from_state(state, story))
    for node_id, xy in scene.positions.items():
        assert placed.nodes[node_id].position == xy
    # the original state is untouched
    assert state.nodes["austria"].position == (0.4, 0.5)
