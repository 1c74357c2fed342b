/**
 * SVG realization of a scene description. Layer order is fixed: groups,
 * links, nodes, then annotations and child bubbles on top; the registration
 * strip renders behind everything.
 */
import type { SceneDescription } from "./render.js";
import type { Story } from "./protocol.js";

const PALETTE = [
  "#4878d0", "#ee854a", "#6acc64", "#d65f5f", "#956cb4",
  "#8c613c", "#dc7ec0", "#797979", "#d5bb67", "#82c6e2",
];

export function styleColor(ref: string): string {
  if (!ref) {
    return "#666666";
  }
  if (ref.startsWith("#")) {
    return ref;
  }
  let hash = 0;
  for (const ch of ref) {
    hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  }
  return PALETTE[hash % PALETTE.length];
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el(name: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function drawScene(
  svg: SVGSVGElement,
  description: SceneDescription,
  story: Story,
  width = 1200,
): void {
  const height = Math.round((width * story.board.height_cm) / story.board.width_cm);
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.innerHTML = "";
  const sx = (v: number) => v * width;
  const sy = (v: number) => v * height;
  const sr = (v: number) => v * width;

  const [rx0, ry0, rx1, ry1] = story.zones.registration;
  svg.appendChild(
    el("rect", {
      x: sx(rx0), y: sy(ry0), width: sx(rx1 - rx0), height: sy(ry1 - ry0),
      fill: "#f4f4f4", stroke: "#dddddd",
    }),
  );

  for (const slot of description.slots) {
    svg.appendChild(
      el("circle", {
        cx: sx(slot.x), cy: sy(slot.y), r: sr(slot.r),
        fill: slot.bound ? "#dcefdc" : "#ffffff",
        stroke: slot.bound ? "#3c763c" : "#aaaaaa",
        "stroke-dasharray": slot.bound ? "none" : "6 4",
      }),
    );
    const label = el("text", {
      x: sx(slot.x), y: sy(slot.y) + sr(slot.r) + 14,
      "text-anchor": "middle", "font-size": 12, fill: "#555555",
    });
    label.textContent = slot.label;
    svg.appendChild(label);
  }

  for (const group of description.groups) {
    const points = group.points.map((p) => `${sx(p[0])},${sy(p[1])}`).join(" ");
    svg.appendChild(
      el("polygon", {
        points,
        fill: styleColor(group.fill || group.id),
        "fill-opacity": 0.25,
        stroke: styleColor(group.fill || group.id),
      }),
    );
  }

  for (const link of description.links) {
    let [x1, y1, x2, y2] = [sx(link.x1), sy(link.y1), sx(link.x2), sy(link.y2)];
    if (link.arrow === "reverse") {
      [x1, y1, x2, y2] = [x2, y2, x1, y1];
    }
    const line = el("line", {
      x1, y1, x2, y2,
      stroke: styleColor(link.stroke || link.id),
      "stroke-width": 2 * link.width,
    });
    if (link.arrow !== "none") {
      line.setAttribute("marker-end", "url(#arrowhead)");
    }
    svg.appendChild(line);
  }

  const defs = el("defs", {});
  const marker = el("marker", {
    id: "arrowhead", viewBox: "0 0 10 10", refX: 28, refY: 5,
    markerWidth: 7, markerHeight: 7, orient: "auto-start-reverse",
  });
  marker.appendChild(el("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#333333" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const node of description.nodes) {
    svg.appendChild(
      el("circle", {
        cx: sx(node.x), cy: sy(node.y), r: sr(node.radius),
        fill: styleColor(node.fill || node.id),
        stroke: node.highlighted ? "#b8860b" : "#333333",
        "stroke-width": node.highlighted ? 4 : 1.5,
        "data-node": node.id,
      }),
    );
    const label = el("text", {
      x: sx(node.x), y: sy(node.y) + sr(node.radius) + 14,
      "text-anchor": "middle", "font-size": 13, fill: "#222222",
    });
    label.textContent = node.state_label || node.label;
    svg.appendChild(label);
  }

  for (const note of description.annotations) {
    const box = el("g", {});
    const text = el("text", {
      x: sx(note.x), y: sy(note.y) - 8, "text-anchor": "middle",
      "font-size": 12, fill: "#333333",
    });
    text.textContent = note.text;
    box.appendChild(text);
    svg.appendChild(box);
  }

  for (const bubble of description.child_bubbles) {
    svg.appendChild(
      el("circle", {
        cx: sx(bubble.x), cy: sy(bubble.y), r: sr(bubble.r),
        fill: "#eef4ff", "fill-opacity": 0.9,
        stroke: "#4878d0", "stroke-dasharray": "5 4",
      }),
    );
    for (const line of bubble.links) {
      svg.appendChild(
        el("line", {
          x1: sx(line.x1), y1: sy(line.y1), x2: sx(line.x2), y2: sy(line.y2),
          stroke: "#4878d0", "stroke-width": 1,
        }),
      );
    }
    for (const member of bubble.members) {
      svg.appendChild(
        el("circle", {
          cx: sx(member.x), cy: sy(member.y), r: sr(bubble.r) * 0.12,
          fill: "#4878d0",
        }),
      );
    }
  }
}
