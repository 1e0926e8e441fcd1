/** Trace-file CSV reading with path/line error reporting. */

import { readFileSync } from "node:fs";

export const COLUMNS = [
  "iteration",
  "elapsed_s",
  "primal",
  "fw_gap",
  "active_set_size",
  "step_kind",
  "lmo_calls",
  "extra1",
  "extra2",
] as const;

export interface TraceRecord {
  iteration: number;
  elapsed_s: number;
  primal: number;
  fw_gap: number;
  active_set_size: number;
  step_kind: string;
  lmo_calls: number;
  extra1: number | null;
  extra2: number | string | null;
}

export class TraceParseError extends Error {
  constructor(message: string, readonly path: string, readonly line: number) {
    super(`${path}:${line}: ${message}`);
    this.name = "TraceParseError";
  }
}

export class MissingColumnError extends Error {
  constructor(readonly path: string, readonly missing: string[]) {
    super(`${path}: missing column(s) ${missing.join(", ")}`);
    this.name = "MissingColumnError";
  }
}

function parseNumber(cell: string, path: string, line: number, field: string): number {
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new TraceParseError(`field ${field} is not a number: ${JSON.stringify(cell)}`, path, line);
  }
  return value;
}

export function readTrace(path: string): TraceRecord[] {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new TraceParseError("empty file", path, 1);
  }
  const header = lines[0].split(",");
  const missing = COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new MissingColumnError(path, missing);
  }
  if (header.length !== COLUMNS.length || COLUMNS.some((c, i) => header[i] !== c)) {
    throw new TraceParseError(`unexpected header ${JSON.stringify(lines[0])}`, path, 1);
  }
  const records: TraceRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const raw = lines[i];
    if (raw.trim() === "") continue;
    const cells = raw.split(",");
    const lineNo = i + 1;
    if (cells.length !== COLUMNS.length) {
      throw new TraceParseError(
        `expected ${COLUMNS.length} fields, got ${cells.length}`,
        path,
        lineNo,
      );
    }
    records.push({
      iteration: parseNumber(cells[0], path, lineNo, "iteration"),
      elapsed_s: parseNumber(cells[1], path, lineNo, "elapsed_s"),
      primal: parseNumber(cells[2], path, lineNo, "primal"),
      fw_gap: parseNumber(cells[3], path, lineNo, "fw_gap"),
      active_set_size: parseNumber(cells[4], path, lineNo, "active_set_size"),
      step_kind: cells[5],
      lmo_calls: parseNumber(cells[6], path, lineNo, "lmo_calls"),
      extra1: cells[7] === "" ? null : parseNumber(cells[7], path, lineNo, "extra1"),
      extra2: cells[8] === "" ? null : Number.isNaN(Number(cells[8])) ? cells[8] : Number(cells[8]),
    });
  }
  if (records.length === 0) {
    throw new TraceParseError("no records", path, 1);
  }
  return records;
}
