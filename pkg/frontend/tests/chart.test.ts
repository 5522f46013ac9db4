import { describe, expect, it } from "vitest";
import { DEFAULT_LAYOUT, renderChartSvg, scaleSeries } from "../src/chart.js";

describe("scaleSeries", () => {
  it("maps a rising series to strictly descending svg y (up on screen)", () => {
    const points = [0.69, 0.76, 0.81, 0.86, 0.94].map((v, i) => ({ t: i, value: v }));
    const { xy } = scaleSeries(points);
    const ys = xy.map((p) => p.y);
    for (let i = 1; i < ys.length; i++) expect(ys[i]!).toBeLessThan(ys[i - 1]!);
    const xs = xy.map((p) => p.x);
    for (let i = 1; i < xs.length; i++) expect(xs[i]!).toBeGreaterThan(xs[i - 1]!);
  });

  it("keeps every point inside the padded box", () => {
    const points = [5, 1, 9, 3].map((v, i) => ({ t: i, value: v }));
    const { xy } = scaleSeries(points);
    for (const p of xy) {
      expect(p.x).toBeGreaterThanOrEqual(DEFAULT_LAYOUT.pad);
      expect(p.x).toBeLessThanOrEqual(DEFAULT_LAYOUT.width - DEFAULT_LAYOUT.pad);
      expect(p.y).toBeGreaterThanOrEqual(DEFAULT_LAYOUT.pad);
      expect(p.y).toBeLessThanOrEqual(DEFAULT_LAYOUT.height - DEFAULT_LAYOUT.pad);
    }
  });

  it("handles empty and flat series", () => {
    expect(scaleSeries([]).path).toBe("");
    const flat = scaleSeries([{ t: 0, value: 2 }, { t: 1, value: 2 }]);
    expect(flat.xy[0]!.y).toBeCloseTo(flat.xy[1]!.y, 10);
  });

  it("reports min and max", () => {
    const { min, max } = scaleSeries([{ t: 0, value: 105.3757 }, { t: 1, value: 167.1618 }]);
    expect(min).toBeCloseTo(105.3757, 10);
    expect(max).toBeCloseTo(167.1618, 10);
  });
});

describe("renderChartSvg", () => {
  it("writes a path and one dot per point into the svg", () => {
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    renderChartSvg(svg, [{ t: 0, value: 1 }, { t: 1, value: 2 }, { t: 2, value: 3 }]);
    expect(svg.querySelectorAll("circle").length).toBe(3);
    expect(svg.querySelector("path")?.getAttribute("d")).toMatch(/^M/);
    expect(svg.textContent).toContain("3.0000");
  });
});
