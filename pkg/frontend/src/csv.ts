/** Minimal reader for the experiment CSV files: comma-separated, one header
 * row, no quoting (the producer rejects embedded separators). */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty file");
  }
  const header = lines[0].split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== header.length) {
      throw new Error(`row ${i + 1} has ${fields.length} fields, expected ${header.length}`);
    }
    rows.push(fields);
  }
  return { header, rows };
}

/** Validate that every required column exists; returns a name -> index map.
 * The error names the first missing column so callers can surface it. */
export function requireColumns(table: Table, required: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of required) {
    const at = table.header.indexOf(name);
    if (at < 0) {
      throw new Error(`missing column ${name}`);
    }
    index.set(name, at);
  }
  return index;
}

export function toNumber(field: string, column: string): number {
  const value = Number(field);
  if (!Number.isFinite(value)) {
    throw new Error(`column ${column}: not a finite number: ${field}`);
  }
  return value;
}
