/**
 * CSV reading shared by all plot kinds.
 *
 * Artifact files start with a `# config {...}` comment line followed by a
 * header row; comment lines anywhere are skipped. Values stay as strings
 * until a caller asks for a numeric column, so schema errors can name the
 * offending column.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0 && !ln.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError("CSV has no header row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows = lines.slice(1).map((ln) => ln.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new SchemaError(
        `row has ${row.length} fields, header has ${header.length}: ${row.join(",")}`,
      );
    }
  }
  return { header, rows };
}

export function columnIndex(table: Table, name: string): number {
  const i = table.header.indexOf(name);
  if (i < 0) {
    throw new SchemaError(`missing column '${name}' (have: ${table.header.join(", ")})`);
  }
  return i;
}

export function numericColumn(table: Table, name: string): number[] {
  const i = columnIndex(table, name);
  return table.rows.map((row) => {
    const v = Number(row[i]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`non-numeric value '${row[i]}' in column '${name}'`);
    }
    return v;
  });
}
