/**
 * Pure scene description: everything the DOM layer needs to draw one
 * revision, in fixed layer order (groups under links under nodes under
 * annotations and child bubbles), plus the registration slots with their
 * bound/unbound status.
 */
import { layoutScene } from "./layout.js";
import type { Point } from "./layout.js";
import type { Snapshot, Story } from "./protocol.js";

export interface NodeGlyph {
  id: string;
  x: number;
  y: number;
  radius: number;
  label: string;
  fill: string;
  state_label: string;
  highlighted: boolean;
  kind: "primary" | "secondary";
}

export interface LinkGlyph {
  id: string;
  source: string;
  target: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
  stroke: string;
  type_label: string;
  arrow: "none" | "forward" | "reverse";
}

export interface GroupGlyph {
  id: string;
  points: Point[];
  label: string;
  fill: string;
}

export interface AnnotationGlyph {
  node: string;
  x: number;
  y: number;
  text: string;
}

export interface ChildBubbleGlyph {
  node: string;
  x: number;
  y: number;
  r: number;
  members: { id: string; label: string; x: number; y: number }[];
  links: { x1: number; y1: number; x2: number; y2: number }[];
}

export interface SlotGlyph {
  node: string;
  label: string;
  x: number;
  y: number;
  r: number;
  bound: boolean;
}

export interface SceneDescription {
  revision: number;
  nodes: NodeGlyph[];
  links: LinkGlyph[];
  groups: GroupGlyph[];
  annotations: AnnotationGlyph[];
  child_bubbles: ChildBubbleGlyph[];
  slots: SlotGlyph[];
}

export function renderState(snapshot: Snapshot, story: Story): SceneDescription {
  const scene = layoutScene(snapshot, story);
  const nodeById = new Map(story.nodes.map((n) => [n.node_id, n]));
  const childById = new Map((story.child_networks ?? []).map((c) => [c.child_id, c]));
  const groupStyles = story.group_styles ?? [];

  const nodes: NodeGlyph[] = Object.keys(scene.positions)
    .sort()
    .map((id) => {
      const spec = nodeById.get(id)!;
      const view = snapshot.nodes[id];
      const state = spec.states[view.state_index];
      return {
        id,
        x: scene.positions[id][0],
        y: scene.positions[id][1],
        radius: scene.radii[id],
        label: spec.label,
        fill: state.fill ?? "",
        state_label: state.label,
        highlighted: view.highlighted,
        kind: spec.kind,
      };
    });

  const links: LinkGlyph[] = [];
  for (const link of [...story.links].sort((a, b) => a.link_id.localeCompare(b.link_id))) {
    const view = snapshot.links[link.link_id];
    if (!view?.visible) {
      continue;
    }
    const from = scene.positions[link.source];
    const to = scene.positions[link.target];
    if (!from || !to) {
      continue;
    }
    const type = link.types[view.type_index];
    links.push({
      id: link.link_id,
      source: link.source,
      target: link.target,
      x1: from[0],
      y1: from[1],
      x2: to[0],
      y2: to[1],
      width: link.base_width * view.width,
      stroke: type.stroke ?? "",
      type_label: type.label,
      arrow: view.direction,
    });
  }

  const groups: GroupGlyph[] = scene.groupHulls.map((hull, index) => {
    const style = groupStyles.length ? groupStyles[index % groupStyles.length] : undefined;
    return {
      id: hull.group_id,
      points: hull.points,
      label: style?.label ?? "",
      fill: style?.fill ?? "",
    };
  });

  const annotations: AnnotationGlyph[] = Object.keys(scene.annotations)
    .sort()
    .map((id) => ({
      node: id,
      x: scene.annotations[id][0],
      y: scene.annotations[id][1],
      text: nodeById.get(id)?.annotation?.text ?? "",
    }));

  const childBubbles: ChildBubbleGlyph[] = Object.keys(scene.childBubbles)
    .sort()
    .map((id) => {
      const [bx, by, br] = scene.childBubbles[id];
      const child = childById.get(nodeById.get(id)?.child_network ?? "");
      const members: ChildBubbleGlyph["members"] = [];
      const memberAt = new Map<string, Point>();
      const count = Math.max(1, child?.nodes.length ?? 0);
      (child?.nodes ?? []).forEach((cn, k) => {
        const theta = (2 * Math.PI * k) / count;
        const point: Point = [
          bx + 0.5 * br * Math.cos(theta),
          by + 0.5 * br * Math.sin(theta),
        ];
        memberAt.set(cn.node_id, point);
        members.push({ id: cn.node_id, label: cn.label, x: point[0], y: point[1] });
      });
      const bubbleLinks = (child?.links ?? []).map((cl) => {
        const a = memberAt.get(cl.source)!;
        const b = memberAt.get(cl.target)!;
        return { x1: a[0], y1: a[1], x2: b[0], y2: b[1] };
      });
      return { node: id, x: bx, y: by, r: br, members, links: bubbleLinks };
    });

  const boundNodes = new Set(Object.values(snapshot.bindings));
  const slots: SlotGlyph[] = (story.registration_slots ?? [])
    .slice()
    .sort((a, b) => a.node_id.localeCompare(b.node_id))
    .map((slot) => ({
      node: slot.node_id,
      label: nodeById.get(slot.node_id)?.label ?? slot.node_id,
      x: slot.center[0],
      y: slot.center[1],
      r: slot.radius,
      bound: boundNodes.has(slot.node_id),
    }));

  return {
    revision: snapshot.revision,
    nodes,
    links,
    groups,
    annotations,
    child_bubbles: childBubbles,
    slots,
  };
}
