"""Rendering of scenes and session timelines to image files.

Used by the replay CLI to drop publication-style figures next to the
delimited trace output: a node-link scene for the final snapshot and a lane
timeline of recognized actions and emitted commands.
"""
from __future__ import annotations

import hashlib

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle, FancyArrowPatch, Polygon

from .commands import InteractionCommand
from .events import UserActionEvent
from .layout import SceneLayout, layout, poses_from_state
from .story import StoryDocument
from .vizstate import VizState

_PALETTE = (
    "#4878d0", "#ee854a", "#6acc64", "#d65f5f", "#956cb4",
    "#8c613c", "#dc7ec0", "#797979", "#d5bb67", "#82c6e2",
)


def _style_color(ref: str) -> str:
    """Stable color for a style ref; refs that look like colors pass through."""
    if ref.startswith("#") or ref in {"red", "green", "blue", "black", "gray", "navy", "orange"}:
        return ref
    digest = hashlib.sha256(ref.encode("utf-8")).digest()
    return _PALETTE[digest[0] % len(_PALETTE)]


def render_scene(
    state: VizState,
    story: StoryDocument,
    path: str,
    scene: SceneLayout | None = None,
    title: str | None = None,
) -> None:
    """Draw the current scene (nodes, links, groups, annotations) to a file."""
    if scene is None:
        scene = layout(state, story, poses_from_state(state, story))
    aspect = story.board[1] / story.board[0] if story.board[0] else 0.6
    fig, ax = plt.subplots(figsize=(10, 10 * aspect))
    ax.set_xlim(0, 1)
    ax.set_ylim(1, 0)  # board origin top-left, y down
    ax.set_aspect("equal")
    ax.axis("off")

    rz = story.registration_zone
    ax.add_patch(
        plt.Rectangle(
            (rz[0], rz[1]), rz[2] - rz[0], rz[3] - rz[1],
            facecolor="#f2f2f2", edgecolor="#cccccc", linewidth=0.8, zorder=0,
        )
    )

    for hull in scene.group_hulls:
        pts = hull["points"]
        if len(pts) >= 3:
            ax.add_patch(
                Polygon(pts, closed=True, facecolor="#ffe9b3", edgecolor="#d4a017",
                        alpha=0.6, linewidth=1.2, zorder=1)
            )

    for link in scene.links:
        spec = story.link(link["link_id"])
        stroke = spec.types[link["type_index"]].stroke
        color = _style_color(stroke) if stroke else "#555555"
        x0, y0 = link["from"]
        x1, y1 = link["to"]
        if link["direction"] == "reverse":
            (x0, y0), (x1, y1) = (x1, y1), (x0, y0)
        arrow = "-|>" if link["direction"] in ("forward", "reverse") else "-"
        ax.add_patch(
            FancyArrowPatch(
                (x0, y0), (x1, y1), arrowstyle=arrow,
                mutation_scale=14, linewidth=1.5 * link["width"],
                color=color, zorder=2, shrinkA=12, shrinkB=12,
            )
        )

    for node_id in sorted(scene.positions):
        node = story.node(node_id)
        view = state.nodes[node_id]
        x, y = scene.positions[node_id]
        r = scene.radii[node_id]
        fill = node.states[view.state_index].fill
        color = _style_color(fill) if fill else _style_color(node_id)
        edge = "#b8860b" if view.highlighted else "#333333"
        ax.add_patch(
            Circle((x, y), r, facecolor=color, edgecolor=edge,
                   linewidth=2.5 if view.highlighted else 1.0, zorder=3)
        )
        ax.text(
            x, y + r + 0.012, node.states[view.state_index].label or node.label,
            ha="center", va="top", fontsize=8, zorder=4,
        )

    for node_id, (ax_, ay_) in scene.annotations.items():
        text = story.node(node_id).annotation.text
        ax.annotate(
            text, xy=(ax_, ay_), xytext=(ax_, max(0.02, ay_ - 0.08)),
            ha="center", fontsize=7, zorder=5,
            bbox=dict(boxstyle="round,pad=0.3", facecolor="#ffffff", edgecolor="#888888"),
            arrowprops=dict(arrowstyle="-", color="#888888"),
        )

    for node_id, (bx, by, br) in scene.child_bubbles.items():
        child = story.child(story.node(node_id).child_network)
        ax.add_patch(
            Circle((bx, by), br, facecolor="#eef4ff", edgecolor="#4878d0",
                   linewidth=1.0, linestyle="--", zorder=4)
        )
        count = max(1, len(child.nodes))
        import math as _math

        spots = {}
        for k, cn in enumerate(child.nodes):
            theta = 2 * _math.pi * k / count
            spots[cn.node_id] = (bx + 0.5 * br * _math.cos(theta), by + 0.5 * br * _math.sin(theta))
        for cl in child.links:
            xa, ya = spots[cl.source]
            xb, yb = spots[cl.target]
            ax.plot([xa, xb], [ya, yb], color="#4878d0", linewidth=0.6, zorder=4)
        for cn in child.nodes:
            sx, sy = spots[cn.node_id]
            ax.add_patch(Circle((sx, sy), br * 0.12, facecolor="#4878d0", zorder=5))

    if title:
        ax.set_title(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_timeline(
    actions: list[UserActionEvent],
    commands: list[InteractionCommand],
    path: str,
) -> None:
    """Lane chart: one lane per magnet for actions, one shared command lane."""
    magnets = sorted({m for a in actions for m in a.magnets()})
    lanes = {m: i for i, m in enumerate(magnets)}
    fig, ax = plt.subplots(figsize=(11, max(2.5, 0.5 * (len(magnets) + 2))))
    for a in actions:
        lane = lanes[a.magnets()[0]]
        ax.plot(a.t_ms / 1000.0, lane, "o", markersize=4, color="#4878d0")
        ax.annotate(
            a.kind, (a.t_ms / 1000.0, lane), xytext=(0, 6),
            textcoords="offset points", fontsize=6, rotation=45, ha="left",
        )
    cmd_lane = len(magnets) + 0.8
    for c in commands:
        ax.plot(c.t_ms / 1000.0, cmd_lane, "s", markersize=4, color="#d65f5f")
        ax.annotate(
            c.kind, (c.t_ms / 1000.0, cmd_lane), xytext=(0, 6),
            textcoords="offset points", fontsize=6, rotation=45, ha="left",
        )
    ax.set_yticks(list(lanes.values()) + [cmd_lane])
    ax.set_yticklabels(magnets + ["commands"])
    ax.set_xlabel("time (s)")
    ax.set_ylim(-1, cmd_lane + 1.5)
    ax.grid(axis="x", linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
