/**
 * Wire protocol shared with the engine: observation frames, session
 * messages, story documents, and state snapshots/diffs.
 *
 * Frame records here must parse under the engine's own parser, so the
 * serializer reproduces its canonical shape exactly: fixed six-decimal
 * floats, markers and hands sorted by id, integer millisecond timestamps.
 */

export interface MarkerObservation {
  id: number;
  x: number;
  y: number;
  rot: number;
  conf: number;
}

export interface HandObservation {
  id: number;
  x: number;
  y: number;
  contact: boolean;
}

export interface ObservationFrame {
  t: number;
  markers: MarkerObservation[];
  hands: HandObservation[];
}

export interface StoryNodeState {
  label: string;
  fill?: string;
  icon?: string;
}

export interface StoryNode {
  node_id: string;
  label: string;
  kind: "primary" | "secondary";
  states: StoryNodeState[];
  initial_state_index: number;
  base_scale: number;
  annotation?: { text: string; image?: string };
  child_network?: string;
  anchors?: string[];
  anchor_mode?: "all" | "any";
}

export interface StoryLink {
  link_id: string;
  source: string;
  target: string;
  reveal: "manual" | "auto";
  types: { label: string; stroke?: string }[];
  initial_type_index: number;
  directed: "none" | "forward" | "reverse";
  base_width: number;
}

export interface StoryMagnet {
  magnet_id: string;
  side_a_marker: number;
  side_b_marker: number;
  diameter: number;
  role: "node-carrier" | "widget";
}

export interface StorySlot {
  node_id: string;
  center: [number, number];
  radius: number;
}

export interface ChildNetwork {
  child_id: string;
  nodes: { node_id: string; label: string; style?: string }[];
  links: { source: string; target: string; style?: string }[];
}

export interface Story {
  schema_version: number;
  story_id: string;
  board: { width_cm: number; height_cm: number };
  magnets: StoryMagnet[];
  nodes: StoryNode[];
  links: StoryLink[];
  child_networks?: ChildNetwork[];
  group_styles?: { group_id: string; label?: string; fill?: string; border?: string }[];
  registration_slots?: StorySlot[];
  zones: { registration: number[]; storyboard: number[] };
}

export interface NodeViewState {
  visible: boolean;
  position: [number, number];
  scale: number;
  state_index: number;
  highlighted: boolean;
  annotation_visible: boolean;
  child_visible: boolean;
}

export interface LinkViewState {
  visible: boolean;
  type_index: number;
  direction: "none" | "forward" | "reverse";
  width: number;
}

export interface Snapshot {
  revision: number;
  nodes: Record<string, NodeViewState>;
  links: Record<string, LinkViewState>;
  groups: { group_id: string; members: string[] }[];
  bindings: Record<string, string>;
  group_seq: number;
  command_log: unknown[];
}

export interface StateDiff {
  revision: number;
  command?: unknown;
  nodes?: Record<string, Partial<NodeViewState>>;
  links?: Record<string, Partial<LinkViewState>>;
  groups_added?: { group_id: string; members: string[] }[];
  groups_removed?: string[];
  groups_changed?: Record<string, string[]>;
  bindings?: Record<string, string>;
  bindings_removed?: string[];
  group_seq?: number;
}

export type SessionMessage =
  | { type: "hello"; schema_version: number; story_id: string }
  | { type: "state"; mode: "snapshot"; data: Snapshot }
  | { type: "state"; mode: "diff"; data: StateDiff }
  | { type: "action"; action: Record<string, unknown> }
  | { type: "command"; command: Record<string, unknown> }
  | { type: "error"; code: string; detail: string }
  | { type: "frame"; frame: ObservationFrame }
  | { type: "snapshot_request" };

const fixed = (value: number): string => value.toFixed(6);

/** Quantize like the engine does at observation construction: six decimals. */
export function quantize(value: number): number {
  return Math.round(value * 1e6) / 1e6;
}

export function serializeFrame(frame: ObservationFrame): string {
  const markers = [...frame.markers]
    .sort((a, b) => a.id - b.id)
    .map(
      (m) =>
        `{"id": ${m.id}, "x": ${fixed(m.x)}, "y": ${fixed(m.y)}, ` +
        `"rot": ${fixed(m.rot)}, "conf": ${fixed(m.conf)}}`,
    )
    .join(", ");
  const hands = [...frame.hands]
    .sort((a, b) => a.id - b.id)
    .map(
      (h) =>
        `{"id": ${h.id}, "x": ${fixed(h.x)}, "y": ${fixed(h.y)}, ` +
        `"contact": ${h.contact ? "true" : "false"}}`,
    )
    .join(", ");
  return `{"t": ${frame.t}, "markers": [${markers}], "hands": [${hands}]}`;
}

export class FrameFormatError extends Error {}

function inUnit(value: number): boolean {
  return Number.isFinite(value) && value >= 0 && value <= 1;
}

/** Mirror of the engine-side parser, used to vet frames before emission. */
export function parseFrame(record: string): ObservationFrame {
  let data: unknown;
  try {
    data = JSON.parse(record);
  } catch (err) {
    throw new FrameFormatError(`malformed frame record: ${String(err)}`);
  }
  const obj = data as Record<string, unknown>;
  if (typeof obj !== "object" || obj === null || !Number.isInteger(obj.t)) {
    throw new FrameFormatError("frame record must be an object with an integer 't'");
  }
  const markers: MarkerObservation[] = [];
  const seen = new Set<number>();
  for (const raw of (obj.markers as Record<string, number>[]) ?? []) {
    const m = {
      id: Number(raw.id),
      x: Number(raw.x),
      y: Number(raw.y),
      rot: Number(raw.rot ?? 0),
      conf: Number(raw.conf ?? 1),
    };
    if (!Number.isInteger(m.id) || seen.has(m.id)) {
      throw new FrameFormatError(`bad or duplicate marker id ${raw.id}`);
    }
    if (!inUnit(m.x) || !inUnit(m.y)) {
      throw new FrameFormatError(`marker ${m.id}: center outside [0,1]^2`);
    }
    if (!(m.rot >= 0 && m.rot < 360)) {
      throw new FrameFormatError(`marker ${m.id}: rotation ${m.rot} outside [0, 360)`);
    }
    if (!inUnit(m.conf)) {
      throw new FrameFormatError(`marker ${m.id}: confidence outside [0, 1]`);
    }
    seen.add(m.id);
    markers.push(m);
  }
  const hands: HandObservation[] = [];
  for (const raw of (obj.hands as Record<string, unknown>[]) ?? []) {
    const h = {
      id: Number(raw.id),
      x: Number(raw.x),
      y: Number(raw.y),
      contact: Boolean(raw.contact),
    };
    if (!inUnit(h.x) || !inUnit(h.y)) {
      throw new FrameFormatError(`hand ${h.id}: fingertip outside [0,1]^2`);
    }
    hands.push(h);
  }
  markers.sort((a, b) => a.id - b.id);
  hands.sort((a, b) => a.id - b.id);
  return { t: obj.t as number, markers, hands };
}

export function frameMessage(frame: ObservationFrame): string {
  return `{"type": "frame", "frame": ${serializeFrame(frame)}}`;
}
