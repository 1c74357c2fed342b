import { describe, expect, it } from "vitest";

import {
  FrameFormatError,
  frameMessage,
  parseFrame,
  quantize,
  serializeFrame,
} from "../src/protocol.js";
import type { ObservationFrame } from "../src/protocol.js";

const sample: ObservationFrame = {
  t: 1234,
  markers: [
    { id: 9, x: 0.25, y: 0.75, rot: 123.456789, conf: 1 },
    { id: 2, x: 0.1, y: 0.2, rot: 0, conf: 0.5 },
  ],
  hands: [{ id: 0, x: 0.5, y: 0.5, contact: true }],
};

describe("frame serialization", () => {
  it("round-trips through the mirror parser", () => {
    const record = serializeFrame(sample);
    const parsed = parseFrame(record);
    expect(parsed.t).toBe(1234);
    expect(parsed.markers.map((m) => m.id)).toEqual([2, 9]);
    expect(parsed.markers[1].rot).toBeCloseTo(123.456789, 6);
    expect(parsed.hands[0].contact).toBe(true);
  });

  it("sorts markers by id and uses six fixed decimals", () => {
    const record = serializeFrame(sample);
    expect(record.indexOf('"id": 2')).toBeLessThan(record.indexOf('"id": 9'));
    expect(record).toContain('"x": 0.100000');
    expect(record).toContain('"rot": 123.456789');
  });

  it("is deterministic", () => {
    expect(serializeFrame(sample)).toBe(serializeFrame(sample));
  });

  it("wraps frames into session messages", () => {
    const message = JSON.parse(frameMessage(sample));
    expect(message.type).toBe("frame");
    expect(message.frame.t).toBe(1234);
  });
});

describe("frame validation", () => {
  it("rejects out-of-range coordinates", () => {
    expect(() =>
      parseFrame('{"t": 0, "markers": [{"id": 1, "x": 1.5, "y": 0.5, "rot": 0, "conf": 1}], "hands": []}'),
    ).toThrow(FrameFormatError);
  });

  it("rejects rotation of 360", () => {
    expect(() =>
      parseFrame('{"t": 0, "markers": [{"id": 1, "x": 0.5, "y": 0.5, "rot": 360, "conf": 1}], "hands": []}'),
    ).toThrow(FrameFormatError);
  });

  it("rejects duplicate fiducials", () => {
    expect(() =>
      parseFrame(
        '{"t": 0, "markers": [{"id": 1, "x": 0.5, "y": 0.5, "rot": 0, "conf": 1}, {"id": 1, "x": 0.2, "y": 0.2, "rot": 0, "conf": 1}], "hands": []}',
      ),
    ).toThrow(FrameFormatError);
  });

  it("rejects non-integer timestamps", () => {
    expect(() => parseFrame('{"t": 1.5, "markers": [], "hands": []}')).toThrow(
      FrameFormatError,
    );
  });
});

describe("quantize", () => {
  it("matches the engine's six-decimal grid", () => {
    expect(quantize(0.1234567891)).toBeCloseTo(0.123457, 9);
    expect(quantize(1 / 3)).toBeCloseTo(0.333333, 9);
  });
});
