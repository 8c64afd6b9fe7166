import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseCsv, SchemaError } from "../src/csv.js";
import { buildGrid, renderHeatmap } from "../src/heatmap.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;
const sweep = parseCsv(readFileSync(FIXTURES + "sweep.csv", "utf8"));

describe("buildGrid", () => {
  it("orients the grid by sorted r and xi_dB", () => {
    const grid = buildGrid(sweep, "fidelity");
    expect(grid.rValues).toEqual([...grid.rValues].sort((a, b) => a - b));
    expect(grid.xiValues).toEqual([...grid.xiValues].sort((a, b) => a - b));
    expect(grid.values.length).toBe(grid.rValues.length);
    expect(grid.values[0].length).toBe(grid.xiValues.length);
  });

  it("fidelity corner ordering: low-r low-xi corner beats high-r high-xi corner", () => {
    const grid = buildGrid(sweep, "fidelity");
    const nr = grid.rValues.length - 1;
    const nxi = grid.xiValues.length - 1;
    expect(grid.values[0][0]).toBeGreaterThan(grid.values[nr][nxi]);
  });

  it("alpha corner ordering: high-r high-xi corner beats low-r low-xi corner", () => {
    const grid = buildGrid(sweep, "alpha");
    const nr = grid.rValues.length - 1;
    const nxi = grid.xiValues.length - 1;
    expect(grid.values[nr][nxi]).toBeGreaterThan(grid.values[0][0]);
  });

  it("reports missing grid cells", () => {
    const table = parseCsv("r,xi_dB,fidelity\n0.1,3,0.9\n0.2,4,0.8\n");
    expect(() => buildGrid(table, "fidelity")).toThrow(SchemaError);
  });
});

describe("renderHeatmap", () => {
  it("renders the sweep fixture without error", () => {
    const svg = renderHeatmap(sweep, "fidelity", 100);
    expect(svg).toContain("<svg");
    expect(svg).toContain("</svg>");
    // one rect per grid cell plus background and colorbar
    const rects = svg.match(/<rect /g) ?? [];
    expect(rects.length).toBeGreaterThanOrEqual(25);
  });

  it("supports selecting the detection probability column", () => {
    expect(renderHeatmap(sweep, "detection_probability", 100)).toContain("detection_probability");
  });

  it("renders a single-cell CSV", () => {
    const table = parseCsv("r,xi_dB,fidelity\n0.1,5,0.97\n");
    const svg = renderHeatmap(table, "fidelity", 100);
    expect(svg).toContain("<svg");
  });

  it("names an unknown value column", () => {
    expect(() => renderHeatmap(sweep, "nope", 100)).toThrow(/'nope'/);
  });

  it("is deterministic for fixed input and dpi", () => {
    expect(renderHeatmap(sweep, "fidelity", 150)).toBe(renderHeatmap(sweep, "fidelity", 150));
  });
});
