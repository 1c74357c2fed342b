/**
 * Reconnecting session client. Applies snapshots and diffs to a SceneModel
 * (revisions strictly monotone; gaps trigger a fresh snapshot request) and
 * surfaces connection state so the shell can show a banner while retrying
 * with exponential backoff.
 */
import { SceneModel } from "./scene.js";
import type { ObservationFrame, SessionMessage } from "./protocol.js";
import { frameMessage } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "retrying" | "closed";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export interface ClientOptions {
  url: string;
  socketFactory?: (url: string) => SocketLike;
  onStatus?: (status: ConnectionStatus, detail?: string) => void;
  onScene?: (scene: SceneModel) => void;
  onHello?: (storyId: string, schemaVersion: number) => void;
  backoffBaseMs?: number;
  backoffMaxMs?: number;
  scheduler?: (fn: () => void, delayMs: number) => void;
}

export class SessionClient {
  readonly scene = new SceneModel();
  private readonly options: ClientOptions;
  private socket: SocketLike | null = null;
  private attempts = 0;
  private stopped = false;

  constructor(options: ClientOptions) {
    this.options = options;
  }

  connect(): void {
    this.stopped = false;
    this.open();
  }

  close(): void {
    this.stopped = true;
    this.socket?.close();
  }

  sendFrame(frame: ObservationFrame): void {
    this.socket?.send(frameMessage(frame));
  }

  requestSnapshot(): void {
    this.socket?.send(JSON.stringify({ type: "snapshot_request" }));
  }

  private open(): void {
    const factory =
      this.options.socketFactory ??
      ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.options.onStatus?.(this.attempts ? "retrying" : "connecting");
    const socket = factory(this.options.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.options.onStatus?.("connected");
      if (this.scene.snapshot) {
        this.requestSnapshot(); // resume from a fresh snapshot
      }
    };
    socket.onmessage = (ev) => this.handle(ev.data);
    socket.onerror = () => {
      /* the close handler owns retries */
    };
    socket.onclose = () => {
      this.socket = null;
      if (this.stopped) {
        this.options.onStatus?.("closed");
        return;
      }
      this.attempts += 1;
      const base = this.options.backoffBaseMs ?? 250;
      const max = this.options.backoffMaxMs ?? 8000;
      const delay = Math.min(max, base * 2 ** Math.min(this.attempts - 1, 10));
      this.options.onStatus?.("retrying", `reconnecting in ${delay} ms`);
      const schedule = this.options.scheduler ?? ((fn, ms) => setTimeout(fn, ms));
      schedule(() => {
        if (!this.stopped) {
          this.open();
        }
      }, delay);
    };
  }

  handle(raw: string): void {
    let message: SessionMessage;
    try {
      message = JSON.parse(raw) as SessionMessage;
    } catch {
      return; // a malformed broadcast never corrupts the scene
    }
    if (message.type === "hello") {
      this.options.onHello?.(message.story_id, message.schema_version);
      return;
    }
    if (message.type !== "state") {
      return;
    }
    const result =
      message.mode === "snapshot"
        ? this.scene.applySnapshot(message.data)
        : this.scene.applyDiff(message.data);
    if (result === "gap") {
      this.requestSnapshot();
      return;
    }
    if (result === "applied") {
      this.options.onScene?.(this.scene);
    }
  }
}
