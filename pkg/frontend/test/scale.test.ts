import { describe, expect, it } from "vitest";

import { formatTick, linearScale, logScale, logTicks, niceLinearTicks } from "../src/scale";

describe("linearScale", () => {
  it("maps the domain endpoints onto the range", () => {
    const s = linearScale([0, 10], [100, 300]);
    expect(s.map(0)).toBe(100);
    expect(s.map(10)).toBe(300);
    expect(s.map(5)).toBe(200);
  });

  it("handles a degenerate domain by padding", () => {
    const s = linearScale([2, 2], [0, 100]);
    expect(Number.isFinite(s.map(2))).toBe(true);
  });
});

describe("logScale", () => {
  it("maps decades evenly", () => {
    const s = logScale([1, 100], [0, 200]);
    expect(s.map(1)).toBeCloseTo(0, 9);
    expect(s.map(10)).toBeCloseTo(100, 9);
    expect(s.map(100)).toBeCloseTo(200, 9);
  });

  it("rejects nonpositive domains", () => {
    expect(() => logScale([0, 10], [0, 1])).toThrowError(/positive/);
  });

  it("emits decade ticks", () => {
    expect(logTicks(1, 1000)).toEqual([1, 10, 100, 1000]);
    expect(logTicks(0.05, 500)).toEqual([0.1, 1, 10, 100]);
  });
});

describe("ticks and labels", () => {
  it("produces round linear ticks covering the span", () => {
    const ticks = niceLinearTicks(0, 10, 6);
    expect(ticks[0]).toBeGreaterThanOrEqual(0);
    expect(ticks[ticks.length - 1]).toBeLessThanOrEqual(10);
    expect(ticks).toContain(0);
    expect(ticks).toContain(10);
  });

  it("formats extremes in scientific style", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(1000)).toBe("1000");
    expect(formatTick(1e-4)).toBe("1E-4");
    expect(formatTick(2.5e6)).toBe("2.5x1E6");
  });
});
