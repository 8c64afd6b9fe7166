import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SchemaError, numericColumn, parseCsv } from "../src/csv.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;

describe("parseCsv", () => {
  it("skips comment lines and keeps every data row", () => {
    const text = readFileSync(FIXTURES + "sweep.csv", "utf8");
    const table = parseCsv(text);
    const dataLines = text
      .split("\n")
      .filter((ln) => ln.length > 0 && !ln.startsWith("#")).length;
    expect(table.rows.length).toBe(dataLines - 1);
    expect(table.header[0]).toBe("r");
  });

  it("round-trips artifact rows without loss", () => {
    const table = parseCsv(readFileSync(FIXTURES + "sweep.csv", "utf8"));
    // 5 r values x 5 xi values from the fixture grid
    expect(table.rows.length).toBe(25);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2,3\n")).toThrow(SchemaError);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("# only a comment\n")).toThrow(SchemaError);
  });

  it("names the missing column in schema errors", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => numericColumn(table, "fidelity")).toThrow(/fidelity/);
  });

  it("names the column for non-numeric values", () => {
    const table = parseCsv("a,b\n1,oops\n");
    expect(() => numericColumn(table, "b")).toThrow(/'oops' in column 'b'/);
  });
});
