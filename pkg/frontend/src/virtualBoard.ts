/**
 * Virtual magnet board: drives a session without hardware by synthesizing
 * tracking frames from pointer gestures. Dragging emits interpolated glide
 * frames, a double-click flips the visible face, press-and-hold emits
 * contact fingertips, hovering emits non-contact fingertips, and the
 * rotation handle emits spin frames. Timestamps share the engine's integer
 * millisecond grid and are strictly monotone; an idle board still emits
 * heartbeat frames so the session clock keeps moving.
 */
import type { ObservationFrame, Story, StoryMagnet } from "./protocol.js";
import { quantize } from "./protocol.js";

interface VirtualMagnet {
  spec: StoryMagnet;
  placed: boolean;
  side: "a" | "b";
  x: number;
  y: number;
  rot: number;
  occluded: boolean;
}

interface Fingertip {
  x: number;
  y: number;
  contact: boolean;
}

export class VirtualBoard {
  readonly rateHz: number;
  private readonly magnets = new Map<string, VirtualMagnet>();
  private frameIndex = 0;
  private lastT = -1;
  private fingertip: Fingertip | null = null;

  constructor(story: Story, rateHz = 60) {
    this.rateHz = rateHz;
    for (const spec of story.magnets) {
      this.magnets.set(spec.magnet_id, {
        spec,
        placed: false,
        side: "a",
        x: 0.5,
        y: 0.5,
        rot: 0,
        occluded: false,
      });
    }
  }

  magnet(id: string): VirtualMagnet {
    const magnet = this.magnets.get(id);
    if (!magnet) {
      throw new Error(`unknown magnet ${id}`);
    }
    return magnet;
  }

  placeMagnet(id: string, x: number, y: number, side: "a" | "b" = "a"): void {
    const magnet = this.magnet(id);
    magnet.placed = true;
    magnet.side = side;
    magnet.x = x;
    magnet.y = y;
  }

  removeMagnet(id: string): void {
    this.magnet(id).placed = false;
  }

  /** Double-click on a magnet: instantaneous side swap. */
  flipMagnet(id: string): void {
    const magnet = this.magnet(id);
    magnet.side = magnet.side === "a" ? "b" : "a";
  }

  private nextFrame(): ObservationFrame {
    const t = Math.round((this.frameIndex * 1000) / this.rateHz);
    this.frameIndex += 1;
    const markers = [];
    for (const magnet of this.magnets.values()) {
      if (!magnet.placed || magnet.occluded) {
        continue;
      }
      const id =
        magnet.side === "a" ? magnet.spec.side_a_marker : magnet.spec.side_b_marker;
      markers.push({
        id,
        x: quantize(magnet.x),
        y: quantize(magnet.y),
        rot: quantize(((magnet.rot % 360) + 360) % 360),
        conf: 1,
      });
    }
    markers.sort((a, b) => a.id - b.id);
    const hands = this.fingertip
      ? [
          {
            id: 0,
            x: quantize(this.fingertip.x),
            y: quantize(this.fingertip.y),
            contact: this.fingertip.contact,
          },
        ]
      : [];
    this.lastT = t;
    return { t, markers, hands };
  }

  private emit(durationMs: number, mutate?: (fraction: number) => void): ObservationFrame[] {
    const frames: ObservationFrame[] = [];
    const count = Math.max(1, Math.round((durationMs * this.rateHz) / 1000));
    for (let k = 0; k < count; k += 1) {
      mutate?.(count === 1 ? 1 : k / (count - 1));
      frames.push(this.nextFrame());
    }
    return frames;
  }

  /** Idle heartbeat: the board keeps reporting whatever is on it. */
  heartbeat(durationMs: number): ObservationFrame[] {
    return this.emit(durationMs);
  }

  /** Pointer drag: linear path from the magnet's pose to the target. */
  dragMagnet(id: string, to: [number, number], durationMs: number): ObservationFrame[] {
    const magnet = this.magnet(id);
    const [x0, y0] = [magnet.x, magnet.y];
    return this.emit(durationMs, (f) => {
      magnet.x = x0 + (to[0] - x0) * f;
      magnet.y = y0 + (to[1] - y0) * f;
    });
  }

  /** Rotation handle: spin by a signed angle over the given duration. */
  spinMagnet(id: string, deltaDeg: number, durationMs: number): ObservationFrame[] {
    const magnet = this.magnet(id);
    const start = magnet.rot;
    return this.emit(durationMs, (f) => {
      magnet.rot = start + deltaDeg * f;
    });
  }

  /** Click-hold on a magnet: contact fingertip at its center. */
  pressMagnet(id: string, durationMs: number): ObservationFrame[] {
    const magnet = this.magnet(id);
    this.fingertip = { x: magnet.x, y: magnet.y, contact: true };
    const frames = this.emit(durationMs, () => {
      this.fingertip = { x: magnet.x, y: magnet.y, contact: true };
    });
    this.fingertip = null;
    return frames;
  }

  /** Hover near a magnet: non-contact fingertip at its center. */
  hoverMagnet(id: string, durationMs: number): ObservationFrame[] {
    const magnet = this.magnet(id);
    this.fingertip = { x: magnet.x, y: magnet.y, contact: false };
    const frames = this.emit(durationMs, () => {
      this.fingertip = { x: magnet.x, y: magnet.y, contact: false };
    });
    this.fingertip = null;
    return frames;
  }

  /** Cover gesture: hand over the magnet, marker hidden while it lingers. */
  coverMagnet(id: string, durationMs: number): ObservationFrame[] {
    const magnet = this.magnet(id);
    magnet.occluded = true;
    this.fingertip = { x: magnet.x, y: magnet.y, contact: false };
    const frames = this.emit(durationMs);
    magnet.occluded = false;
    this.fingertip = null;
    return frames;
  }

  get clockMs(): number {
    return this.lastT;
  }
}
