/**
 * Strict parsing of the harness CSV schema:
 *   mode,N,M,quantity,mean_nats,stderr_nats,seed,mc_samples
 *
 * The header must match exactly (order included); any deviation raises a
 * SchemaError naming the offending column. A header-only file raises
 * EmptyData. The M field may be empty (single-task rows).
 */

export const EXPECTED_HEADER = [
  "mode",
  "N",
  "M",
  "quantity",
  "mean_nats",
  "stderr_nats",
  "seed",
  "mc_samples",
] as const;

export class SchemaError extends Error {}
export class EmptyDataError extends Error {}

export interface SweepRow {
  mode: string;
  n: number;
  m: number | null;
  quantity: string;
  mean: number;
  stderr: number;
  seed: number;
  mcSamples: number;
}

function splitLine(line: string): string[] {
  // the harness never emits quoted fields, but tolerate simple quoting
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (const ch of line) {
    if (ch === '"') {
      quoted = !quoted;
    } else if (ch === "," && !quoted) {
      out.push(field);
      field = "";
    } else {
      field += ch;
    }
  }
  out.push(field);
  return out;
}

function parseNumber(raw: string, column: string, lineNo: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(
      `line ${lineNo}: column "${column}" is not numeric (got "${raw}")`,
    );
  }
  return value;
}

export function parseCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("input is empty: missing header");
  }
  const header = splitLine(lines[0]);
  for (let i = 0; i < EXPECTED_HEADER.length; i++) {
    if (header[i] !== EXPECTED_HEADER[i]) {
      throw new SchemaError(
        `header mismatch: expected column ${i + 1} to be "${EXPECTED_HEADER[i]}"` +
          (header[i] === undefined ? " (missing)" : `, got "${header[i]}"`),
      );
    }
  }
  if (header.length !== EXPECTED_HEADER.length) {
    throw new SchemaError(`header has ${header.length} columns, expected 8`);
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = splitLine(lines[i]);
    if (fields.length !== EXPECTED_HEADER.length) {
      throw new SchemaError(
        `line ${i + 1}: expected 8 fields, got ${fields.length}`,
      );
    }
    rows.push({
      mode: fields[0],
      n: parseNumber(fields[1], "N", i + 1),
      m: fields[2].trim() === "" ? null : parseNumber(fields[2], "M", i + 1),
      quantity: fields[3],
      mean: parseNumber(fields[4], "mean_nats", i + 1),
      stderr: parseNumber(fields[5], "stderr_nats", i + 1),
      seed: parseNumber(fields[6], "seed", i + 1),
      mcSamples: parseNumber(fields[7], "mc_samples", i + 1),
    });
  }
  if (rows.length === 0) {
    throw new EmptyDataError("no data rows after the header");
  }
  return rows;
}
