import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { SceneModel } from "../src/scene.js";
import type { SessionMessage, Snapshot, StateDiff } from "../src/protocol.js";

const dataUrl = (name: string) =>
  fileURLToPath(new URL(`./data/${name}`, import.meta.url));

function sessionMessages(): SessionMessage[] {
  return readFileSync(dataUrl("golden_session.jsonl"), "utf-8")
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line) as SessionMessage);
}

function snapshotAndDiffs(): { snapshot: Snapshot; diffs: StateDiff[] } {
  const messages = sessionMessages();
  const snapshot = (
    messages.find((m) => m.type === "state" && m.mode === "snapshot") as {
      data: Snapshot;
    }
  ).data;
  const diffs = messages
    .filter((m): m is { type: "state"; mode: "diff"; data: StateDiff } =>
      m.type === "state" && m.mode === "diff",
    )
    .map((m) => m.data);
  return { snapshot, diffs };
}

describe("scene model", () => {
  it("folds the golden diff stream to the final revision", () => {
    const { snapshot, diffs } = snapshotAndDiffs();
    const scene = new SceneModel();
    expect(scene.applySnapshot(snapshot)).toBe("applied");
    for (const diff of diffs) {
      expect(scene.applyDiff(diff)).toBe("applied");
    }
    expect(scene.revision).toBe(diffs[diffs.length - 1].revision);
    expect(scene.snapshot?.nodes.germany.visible).toBe(true);
    expect(scene.snapshot?.nodes.italy.visible).toBe(false);
    expect(scene.snapshot?.nodes.russia.state_index).toBe(1);
  });

  it("never renders a lower revision after a higher one", () => {
    const { snapshot, diffs } = snapshotAndDiffs();
    const scene = new SceneModel();
    scene.applySnapshot(snapshot);
    const rendered: number[] = [];
    // adversarial reordering: deliver some diffs swapped, then everything again
    const shuffled = [...diffs];
    for (let i = 0; i < shuffled.length - 1; i += 7) {
      const tmp = shuffled[i];
      shuffled[i] = shuffled[i + 1];
      shuffled[i + 1] = tmp;
    }
    const stream = [...shuffled, ...diffs];
    for (const diff of stream) {
      const result = scene.applyDiff(diff);
      if (result === "applied") {
        rendered.push(scene.revision);
      }
    }
    for (let i = 1; i < rendered.length; i += 1) {
      expect(rendered[i]).toBeGreaterThan(rendered[i - 1]);
    }
  });

  it("reports gaps so the client can request a snapshot", () => {
    const { snapshot, diffs } = snapshotAndDiffs();
    const scene = new SceneModel();
    scene.applySnapshot(snapshot);
    expect(scene.applyDiff(diffs[5])).toBe("gap");
    expect(scene.revision).toBe(snapshot.revision);
  });

  it("ignores stale snapshots", () => {
    const { snapshot, diffs } = snapshotAndDiffs();
    const scene = new SceneModel();
    scene.applySnapshot(snapshot);
    for (const diff of diffs) {
      scene.applyDiff(diff);
    }
    const high = scene.revision;
    expect(scene.applySnapshot(snapshot)).toBe("stale");
    expect(scene.revision).toBe(high);
  });
});
