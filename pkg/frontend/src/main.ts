/**
 * Browser entry point: connects to a session, renders the live scene, and
 * (in virtual-board mode) turns pointer gestures on the board into tracking
 * frames for the engine.
 */
import { SessionClient } from "./client.js";
import { drawScene } from "./dom.js";
import { renderState } from "./render.js";
import { VirtualBoard } from "./virtualBoard.js";
import type { Story } from "./protocol.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? window.location.host ?? "127.0.0.1:8750";
const virtualMode = params.get("virtual") !== "0";

const svg = document.getElementById("board") as unknown as SVGSVGElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const title = document.getElementById("title") as HTMLSpanElement;

async function boot(): Promise<void> {
  const story: Story = await (await fetch(`http://${host}/story`)).json();
  title.textContent = story.story_id;

  const client = new SessionClient({
    url: `ws://${host}/session`,
    onStatus: (status, detail) => {
      banner.textContent =
        status === "connected" ? "" : `session ${status}${detail ? ` (${detail})` : ""}`;
      banner.style.display = status === "connected" ? "none" : "block";
    },
    onScene: (scene) => {
      if (scene.snapshot) {
        drawScene(svg, renderState(scene.snapshot, story), story);
      }
    },
  });
  client.connect();

  if (!virtualMode) {
    return;
  }
  const board = new VirtualBoard(story, 30);
  let selected: string | null = null;
  const carrierIds = story.magnets.map((m) => m.magnet_id);
  let nextMagnet = 0;

  const toBoard = (ev: PointerEvent): [number, number] => {
    const rect = svg.getBoundingClientRect();
    return [
      Math.min(1, Math.max(0, (ev.clientX - rect.left) / rect.width)),
      Math.min(1, Math.max(0, (ev.clientY - rect.top) / rect.height)),
    ];
  };

  svg.addEventListener("pointerdown", (ev) => {
    const [x, y] = toBoard(ev as PointerEvent);
    if (ev.shiftKey) {
      const id = carrierIds[nextMagnet % carrierIds.length];
      nextMagnet += 1;
      board.placeMagnet(id, x, y);
      selected = id;
    } else if (selected) {
      for (const frame of board.pressMagnet(selected, 150)) {
        client.sendFrame(frame);
      }
    }
  });
  svg.addEventListener("pointermove", (ev) => {
    if (selected && (ev as PointerEvent).buttons === 1 && !ev.shiftKey) {
      const [x, y] = toBoard(ev as PointerEvent);
      for (const frame of board.dragMagnet(selected, [x, y], 50)) {
        client.sendFrame(frame);
      }
    }
  });
  svg.addEventListener("dblclick", () => {
    if (selected) {
      board.flipMagnet(selected);
    }
  });
  svg.addEventListener("wheel", (ev) => {
    if (selected) {
      const delta = (ev as WheelEvent).deltaY > 0 ? 15 : -15;
      for (const frame of board.spinMagnet(selected, delta, 100)) {
        client.sendFrame(frame);
      }
      ev.preventDefault();
    }
  });
  window.setInterval(() => {
    for (const frame of board.heartbeat(200)) {
      client.sendFrame(frame);
    }
  }, 200);
}

boot().catch((err) => {
  banner.textContent = `failed to start: ${err}`;
  banner.style.display = "block";
});
