import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SchemaError, parseCsv } from "../src/csv.js";
import { diverging } from "../src/colormap.js";
import { buildWignerGrid, renderWigner } from "../src/wigner.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;
const vacuum = parseCsv(readFileSync(FIXTURES + "wigner.csv", "utf8"));

describe("buildWignerGrid", () => {
  it("reconstructs the rectangular grid", () => {
    const grid = buildWignerGrid(vacuum);
    expect(grid.qValues.length).toBe(41);
    expect(grid.pValues.length).toBe(41);
  });

  it("vacuum grid is positive and rotationally symmetric", () => {
    const grid = buildWignerGrid(vacuum);
    const n = grid.qValues.length;
    const mid = (n - 1) / 2;
    let min = Infinity;
    for (const row of grid.values) {
      for (const v of row) {
        min = Math.min(min, v);
      }
    }
    expect(min).toBeGreaterThanOrEqual(0);
    // peak at the origin, symmetric under (q, p) -> (-q, -p)
    const peak = grid.values[mid][mid];
    expect(peak).toBeCloseTo(2 / Math.PI, 6);
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < n; j++) {
        expect(grid.values[i][j]).toBeCloseTo(grid.values[n - 1 - i][n - 1 - j], 8);
      }
    }
  });

  it("rejects a non-rectangular grid", () => {
    const table = parseCsv("q,p,w\n0,0,1\n0,1,0.5\n1,0,0.5\n");
    expect(() => buildWignerGrid(table)).toThrow(SchemaError);
  });
});

describe("diverging colormap", () => {
  it("is pinned to white at zero regardless of range", () => {
    expect(diverging(0, 1)).toBe("#ffffff");
    expect(diverging(0, 123.4)).toBe("#ffffff");
  });

  it("orders blue below zero and red above", () => {
    const low = diverging(-1, 1);
    const high = diverging(1, 1);
    expect(low).toBe("#2166ac");
    expect(high).toBe("#b2182b");
  });
});

describe("renderWigner", () => {
  it("renders the vacuum fixture without error", () => {
    const svg = renderWigner(vacuum, 100);
    expect(svg).toContain("<svg");
    expect(svg).toContain("</svg>");
  });

  it("is deterministic for fixed input and dpi", () => {
    expect(renderWigner(vacuum, 100)).toBe(renderWigner(vacuum, 100));
  });
});
