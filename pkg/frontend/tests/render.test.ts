import { describe, expect, it } from "vitest";

import { applyScale, makeScale, markerPath, ticks } from "../src/render.js";

describe("scales", () => {
  it("maps the padded domain onto the range linearly", () => {
    const scale = makeScale([0, 10], [0, 100], 0);
    expect(applyScale(scale, 0)).toBe(0);
    expect(applyScale(scale, 10)).toBe(100);
    expect(applyScale(scale, 5)).toBe(50);
  });

  it("handles inverted ranges for screen-y coordinates", () => {
    const scale = makeScale([0, 1], [200, 0], 0);
    expect(applyScale(scale, 0)).toBe(200);
    expect(applyScale(scale, 1)).toBe(0);
  });

  it("widens degenerate domains", () => {
    const scale = makeScale([2, 2], [0, 10]);
    expect(scale.domain[0]).toBeLessThan(2);
    expect(scale.domain[1]).toBeGreaterThan(2);
  });

  it("produces evenly spaced ticks covering the domain", () => {
    const scale = makeScale([0, 1], [0, 10], 0);
    const t = ticks(scale, 5);
    expect(t).toHaveLength(5);
    expect(t[0]).toBeCloseTo(0);
    expect(t[4]).toBeCloseTo(1);
  });
});

describe("markerPath", () => {
  it("draws a diamond through the four axis-aligned extremes", () => {
    expect(markerPath("diamond", 10, 20, 5)).toBe("M 10 15 L 15 20 L 10 25 L 5 20 Z");
  });

  it("draws a square covering the bounding box", () => {
    expect(markerPath("square", 0, 0, 2)).toBe("M -2 -2 H 2 V 2 H -2 Z");
  });

  it("draws a closed circle path", () => {
    const path = markerPath("circle", 0, 0, 3);
    expect(path).toContain("A 3 3");
    expect(path.endsWith("Z")).toBe(true);
  });
});
