import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseArgs, run } from "../src/cli.js";
import { SchemaError } from "../src/csv.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;

describe("parseArgs", () => {
  it("parses a full invocation", () => {
    const args = parseArgs([
      "violin", "--in", "a.csv", "--overlay", "b.csv", "--out", "c.svg", "--dpi", "150",
    ]);
    expect(args).toEqual({
      kind: "violin", input: "a.csv", overlay: "b.csv", out: "c.svg",
      value: "fidelity", dpi: 150,
    });
  });

  it("rejects unknown kinds and missing flags", () => {
    expect(() => parseArgs(["histogram", "--in", "a", "--out", "b"])).toThrow(SchemaError);
    expect(() => parseArgs(["heatmap", "--in", "a"])).toThrow(/--out/);
    expect(() => parseArgs(["heatmap", "--in", "a", "--out", "b", "--dpi", "x"])).toThrow(/--dpi/);
  });
});

describe("run", () => {
  it("writes each plot kind end to end", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    run(["heatmap", "--in", FIXTURES + "sweep.csv", "--out", join(dir, "heat.svg"),
      "--value", "alpha"]);
    run(["violin", "--in", FIXTURES + "robustness.csv", "--out", join(dir, "violin.svg")]);
    run(["wigner", "--in", FIXTURES + "wigner.csv", "--out", join(dir, "wigner.svg")]);
    for (const name of ["heat.svg", "violin.svg", "wigner.svg"]) {
      expect(existsSync(join(dir, name))).toBe(true);
      expect(readFileSync(join(dir, name), "utf8")).toContain("</svg>");
    }
  });
});
