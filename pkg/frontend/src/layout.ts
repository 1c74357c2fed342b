/**
 * Deterministic scene layout, mirroring the engine's placement rules so the
 * companion renders nodes exactly where the projector would: primaries sit
 * one and a half magnet radii above their magnets, secondaries take
 * golden-angle ring slots around their anchor centroid (node-id order,
 * nudged outward until disc-free), groups get padded convex hulls of their
 * member discs, and child networks live in side bubbles clamped inboard.
 */
import type { Snapshot, Story } from "./protocol.js";

export const GOLDEN_ANGLE_DEG = 360.0 * (1.0 - 2.0 / (1.0 + Math.sqrt(5.0)));
export const NODE_OFFSET_RADII = 1.5;
export const RING_RADII = 2.5;
export const CHILD_OFFSET_RADII = 3.0;
export const CHILD_BUBBLE_RADII = 2.0;
export const HULL_PADDING = 0.02;
export const NUDGE_STEP_RADII = 0.25;
export const MAX_NUDGES = 400;

export type Point = [number, number];

export interface SceneLayout {
  positions: Record<string, Point>;
  radii: Record<string, number>;
  groupHulls: { group_id: string; points: Point[] }[];
  childBubbles: Record<string, [number, number, number]>;
  annotations: Record<string, Point>;
}

const clamp = (v: number, lo: number, hi: number): number =>
  v < lo ? lo : v > hi ? hi : v;

const clampPoint = (p: Point): Point => [clamp(p[0], 0, 1), clamp(p[1], 0, 1)];

const dist = (a: Point, b: Point): number => Math.hypot(a[0] - b[0], a[1] - b[1]);

export function meanCarrierRadius(story: Story): number {
  const carriers = story.magnets.filter((m) => m.role === "node-carrier");
  const pool = carriers.length ? carriers : story.magnets;
  if (!pool.length) {
    return 0.02;
  }
  return pool.reduce((acc, m) => acc + m.diameter, 0) / pool.length / 2.0;
}

function convexHull(points: Point[]): Point[] {
  const unique = new Map<string, Point>();
  for (const p of points) {
    unique.set(`${p[0]}|${p[1]}`, p);
  }
  const pts = [...unique.values()].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  if (pts.length <= 2) {
    return pts;
  }
  const cross = (o: Point, a: Point, b: Point): number =>
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  const lower: Point[] = [];
  for (const p of pts) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0) {
      lower.pop();
    }
    lower.push(p);
  }
  const upper: Point[] = [];
  for (const p of [...pts].reverse()) {
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0) {
      upper.pop();
    }
    upper.push(p);
  }
  return [...lower.slice(0, -1), ...upper.slice(0, -1)];
}

function discHull(discs: [number, number, number][], samples = 16): Point[] {
  const points: Point[] = [];
  for (const [cx, cy, r] of discs) {
    for (let k = 0; k < samples; k += 1) {
      const theta = (2 * Math.PI * k) / samples;
      points.push([cx + r * Math.cos(theta), cy + r * Math.sin(theta)]);
    }
  }
  return convexHull(points);
}

export function layoutScene(snapshot: Snapshot, story: Story): SceneLayout {
  const scene: SceneLayout = {
    positions: {},
    radii: {},
    groupHulls: [],
    childBubbles: {},
    annotations: {},
  };
  const baseRadius = meanCarrierRadius(story);
  const magnetById = new Map(story.magnets.map((m) => [m.magnet_id, m]));
  const nodeById = new Map(story.nodes.map((n) => [n.node_id, n]));

  const primaries = story.nodes
    .filter((n) => n.kind === "primary")
    .sort((a, b) => a.node_id.localeCompare(b.node_id));
  for (const node of primaries) {
    const view = snapshot.nodes[node.node_id];
    if (!view?.visible) {
      continue;
    }
    let magnetId: string | undefined;
    for (const [magnet, bound] of Object.entries(snapshot.bindings)) {
      if (bound === node.node_id) {
        magnetId = magnet;
        break;
      }
    }
    const magnet = magnetId ? magnetById.get(magnetId) : undefined;
    if (!magnet) {
      continue; // unplaceable without a magnet pose; the engine refuses too
    }
    const radius = magnet.diameter / 2.0;
    const pose = view.position;
    scene.positions[node.node_id] = clampPoint([
      pose[0],
      pose[1] - NODE_OFFSET_RADII * radius,
    ]);
    scene.radii[node.node_id] = radius * node.base_scale * view.scale;
  }

  const placed: [Point, number][] = Object.keys(scene.positions)
    .sort()
    .map((id) => [scene.positions[id], scene.radii[id]]);

  let ringIndex = 0;
  const secondaries = story.nodes
    .filter((n) => n.kind === "secondary")
    .sort((a, b) => a.node_id.localeCompare(b.node_id));
  for (const node of secondaries) {
    const view = snapshot.nodes[node.node_id];
    if (!view?.visible) {
      continue;
    }
    const anchors = (node.anchors ?? [])
      .filter((a) => a in scene.positions && snapshot.nodes[a]?.visible)
      .map((a) => scene.positions[a]);
    if (!anchors.length) {
      continue;
    }
    const cx = anchors.reduce((acc, p) => acc + p[0], 0) / anchors.length;
    const cy = anchors.reduce((acc, p) => acc + p[1], 0) / anchors.length;
    const radius = baseRadius * node.base_scale * view.scale;
    const angle = ((ringIndex * GOLDEN_ANGLE_DEG) % 360.0) * (Math.PI / 180.0);
    ringIndex += 1;
    const ringR = RING_RADII * baseRadius;
    let position: Point | null = null;
    for (let attempt = 0; attempt < MAX_NUDGES; attempt += 1) {
      const r = ringR + attempt * NUDGE_STEP_RADII * baseRadius;
      const candidate = clampPoint([cx + r * Math.cos(angle), cy + r * Math.sin(angle)]);
      if (placed.every(([other, otherR]) => dist(candidate, other) >= radius + otherR)) {
        position = candidate;
        break;
      }
    }
    if (!position) {
      position = clampPoint([cx + ringR * Math.cos(angle), cy + ringR * Math.sin(angle)]);
    }
    scene.positions[node.node_id] = position;
    scene.radii[node.node_id] = radius;
    placed.push([position, radius]);
  }

  const groups = [...snapshot.groups].sort((a, b) => a.group_id.localeCompare(b.group_id));
  for (const group of groups) {
    const discs: [number, number, number][] = [...group.members]
      .sort()
      .filter((m) => m in scene.positions)
      .map((m) => [
        scene.positions[m][0],
        scene.positions[m][1],
        scene.radii[m] + HULL_PADDING,
      ]);
    if (discs.length < 2) {
      continue;
    }
    scene.groupHulls.push({ group_id: group.group_id, points: discHull(discs) });
  }

  for (const nodeId of Object.keys(scene.positions).sort()) {
    const view = snapshot.nodes[nodeId];
    const node = nodeById.get(nodeId);
    if (!view || !node) {
      continue;
    }
    const [x, y] = scene.positions[nodeId];
    if (view.child_visible && node.child_network) {
      const bubbleR = CHILD_BUBBLE_RADII * baseRadius;
      const bx = clamp(
        x + CHILD_OFFSET_RADII * scene.radii[nodeId] + bubbleR,
        bubbleR,
        1.0 - bubbleR,
      );
      const by = clamp(y, bubbleR, 1.0 - bubbleR);
      scene.childBubbles[nodeId] = [bx, by, bubbleR];
    }
    if (view.annotation_visible && node.annotation) {
      scene.annotations[nodeId] = [x, y - scene.radii[nodeId] - HULL_PADDING];
    }
  }
  return scene;
}
