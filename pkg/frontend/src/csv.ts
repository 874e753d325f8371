import { readFileSync } from "node:fs";

/** Header contract of the run CSVs produced by the simulator. */
export const EXPECTED_HEADER = [
  "k",
  "avg_residual",
  "avg_grad_sq",
  "consensus_x",
  "consensus_y",
  "consensus_z",
  "track_err_y",
  "track_err_z",
  "bits_cumulative",
] as const;

export type ColumnName = (typeof EXPECTED_HEADER)[number];

export class SchemaError extends Error {}

export interface Table {
  path: string;
  rows: number;
  columns: Map<ColumnName, number[]>;
}

/** Parse one run CSV, validating the full header contract. */
export function readRunCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file (expected header '${EXPECTED_HEADER.join(",")}')`);
  }
  const header = lines[0].split(",").map((field) => field.trim());
  const positions = new Map<ColumnName, number>();
  for (const column of EXPECTED_HEADER) {
    const at = header.indexOf(column);
    if (at < 0) {
      throw new SchemaError(`${path}: missing column '${column}'`);
    }
    positions.set(column, at);
  }
  const columns = new Map<ColumnName, number[]>(EXPECTED_HEADER.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length < header.length) {
      const firstMissing = header[fields.length];
      throw new SchemaError(
        `${path}: row ${i} has ${fields.length} of ${header.length} fields, ` +
          `column '${firstMissing}' missing`,
      );
    }
    for (const column of EXPECTED_HEADER) {
      const raw = fields[positions.get(column)!];
      const value = Number(raw);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${path}: row ${i}, column '${column}': not a number ('${raw}')`);
      }
      columns.get(column)!.push(value);
    }
  }
  const rows = columns.get("k")!.length;
  if (rows === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { path, rows, columns };
}
