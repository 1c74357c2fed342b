import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { SceneModel } from "../src/scene.js";
import { renderState } from "../src/render.js";
import type { SessionMessage, Snapshot, StateDiff, Story } from "../src/protocol.js";

const dataUrl = (name: string) =>
  fileURLToPath(new URL(`./data/${name}`, import.meta.url));

const story = JSON.parse(readFileSync(dataUrl("alliance.story.json"), "utf-8")) as Story;

function goldenScene(): SceneModel {
  const scene = new SceneModel();
  for (const line of readFileSync(dataUrl("golden_session.jsonl"), "utf-8").split("\n")) {
    if (!line.trim()) {
      continue;
    }
    const message = JSON.parse(line) as SessionMessage;
    if (message.type === "state" && message.mode === "snapshot") {
      scene.applySnapshot(message.data as Snapshot);
    } else if (message.type === "state") {
      scene.applyDiff(message.data as StateDiff);
    }
  }
  return scene;
}

/** Structural comparison with a numeric tolerance for float fields. */
function expectClose(actual: unknown, expected: unknown, path = "$"): void {
  if (typeof expected === "number") {
    expect(typeof actual, path).toBe("number");
    expect(Math.abs((actual as number) - expected), path).toBeLessThan(1e-9);
    return;
  }
  if (Array.isArray(expected)) {
    expect(Array.isArray(actual), path).toBe(true);
    expect((actual as unknown[]).length, path).toBe(expected.length);
    expected.forEach((item, i) => expectClose((actual as unknown[])[i], item, `${path}[${i}]`));
    return;
  }
  if (expected !== null && typeof expected === "object") {
    const actualKeys = Object.keys(actual as object).sort();
    const expectedKeys = Object.keys(expected).sort();
    expect(actualKeys, path).toEqual(expectedKeys);
    for (const key of expectedKeys) {
      expectClose(
        (actual as Record<string, unknown>)[key],
        (expected as Record<string, unknown>)[key],
        `${path}.${key}`,
      );
    }
    return;
  }
  expect(actual, path).toEqual(expected);
}

describe("renderState", () => {
  it("reproduces the committed reference for the golden final scene", () => {
    const scene = goldenScene();
    const description = renderState(scene.snapshot!, story);
    const reference = JSON.parse(
      readFileSync(dataUrl("golden_scene_reference.json"), "utf-8"),
    );
    expectClose(description, reference);
  });

  it("renders an empty description for the initial state", () => {
    const scene = new SceneModel();
    const messages = readFileSync(dataUrl("golden_session.jsonl"), "utf-8").split("\n");
    const snapshotMessage = JSON.parse(messages[1]) as { data: Snapshot };
    scene.applySnapshot(snapshotMessage.data);
    const description = renderState(scene.snapshot!, story);
    expect(description.revision).toBe(0);
    expect(description.nodes).toEqual([]);
    expect(description.links).toEqual([]);
    expect(description.groups).toEqual([]);
    // the registration area still lists every primary, all unbound
    expect(description.slots.length).toBe(7);
    expect(description.slots.every((slot) => !slot.bound)).toBe(true);
  });

  it("scales disc radii with the node scale factor", () => {
    const scene = goldenScene();
    const snapshot = scene.snapshot!;
    const base = story.magnets.find((m) => m.magnet_id === "mag-germany")!.diameter / 2;
    const description = renderState(snapshot, story);
    const germany = description.nodes.find((n) => n.id === "germany")!;
    expect(germany.radius).toBeCloseTo(base * snapshot.nodes.germany.scale, 9);
    expect(snapshot.nodes.germany.scale).toBeCloseTo(2 ** (270 / 360), 9);
  });

  it("puts exactly one arrowhead on directed links", () => {
    const description = renderState(goldenScene().snapshot!, story);
    const warLink = description.links.find((l) => l.id === "l-gf")!;
    expect(warLink.arrow).toBe("forward");
    const alliance = description.links.find((l) => l.id === "l-ga")!;
    expect(alliance.arrow).toBe("none");
  });

  it("marks bound slots after the golden run", () => {
    const description = renderState(goldenScene().snapshot!, story);
    const bound = description.slots.filter((slot) => slot.bound).map((slot) => slot.node);
    expect(bound).toEqual([
      "austria", "france", "germany", "italy", "russia", "serbia", "uk",
    ]);
  });
});
