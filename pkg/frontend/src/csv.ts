/**
 * Parser for the metrics CSVs the simulation harness emits:
 * '#'-prefixed metadata comments, a fixed header, then numeric rows.
 */

export const COLUMNS = [
  "T",
  "max_err",
  "min_err",
  "mean_consensus",
  "max_gradnorm",
  "empirical_G",
] as const;

export type ColumnName = (typeof COLUMNS)[number];

export type MetricsRow = Record<ColumnName, number>;

export interface MetricsFile {
  path: string;
  meta: Record<string, string>;
  rows: MetricsRow[];
}

export class SchemaError extends Error {
  readonly column: string;

  constructor(path: string, column: string, detail: string) {
    super(`${path}: column ${column}: ${detail}`);
    this.column = column;
  }
}

export function parseMetricsCsv(text: string, path = "<memory>"): MetricsFile {
  const meta: Record<string, string> = {};
  const rows: MetricsRow[] = [];
  let headerSeen = false;

  const lines = text.split(/\r?\n/);
  for (let lineNo = 0; lineNo < lines.length; lineNo++) {
    const line = lines[lineNo].trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    const cells = line.split(",");
    if (!headerSeen) {
      for (let i = 0; i < COLUMNS.length; i++) {
        if (cells[i] !== COLUMNS[i]) {
          throw new SchemaError(path, COLUMNS[i], `expected at position ${i}, found ${cells[i] ?? "<missing>"}`);
        }
      }
      if (cells.length > COLUMNS.length) {
        throw new SchemaError(path, cells[COLUMNS.length], "unexpected extra column");
      }
      headerSeen = true;
      continue;
    }
    if (cells.length !== COLUMNS.length) {
      throw new SchemaError(path, COLUMNS[Math.min(cells.length, COLUMNS.length) - 1],
        `row ${lineNo + 1} has ${cells.length} cells, expected ${COLUMNS.length}`);
    }
    const row = {} as MetricsRow;
    COLUMNS.forEach((name, i) => {
      const value = Number(cells[i]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(path, name, `row ${lineNo + 1}: not a finite number: ${cells[i]}`);
      }
      row[name] = value;
    });
    rows.push(row);
  }
  if (!headerSeen) {
    throw new SchemaError(path, "T", "missing header line");
  }
  return { path, meta, rows };
}

/** Label used in legends: the preset comment when present, else the file stem. */
export function fileLabel(file: MetricsFile): string {
  if (file.meta["preset"]) return file.meta["preset"];
  const base = file.path.split(/[\\/]/).pop() ?? file.path;
  return base.replace(/\.csv$/i, "");
}
