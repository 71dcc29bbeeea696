/**
 * Reader for the experiment result CSV.
 *
 * Schema (header row mandatory, '.' decimal separator):
 *   market, phi, q, flex, mechanism, meanBorda, studentsNoEnvyRatio,
 *   pairsNoEnvyRatio, meanRuntimeMs, instances
 */

export interface ResultRow {
  [column: string]: string;
}

export interface ResultTable {
  columns: string[];
  rows: ResultRow[];
}

export class CsvError extends Error {}

export function parseCsv(text: string): ResultTable {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty file: header row is mandatory");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: ResultRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `row has ${cells.length} cells, header has ${columns.length}: ${line}`
      );
    }
    const row: ResultRow = {};
    columns.forEach((col, i) => {
      row[col] = cells[i].trim();
    });
    rows.push(row);
  }
  return { columns, rows };
}

export function requireColumns(table: ResultTable, names: string[]): void {
  const missing = names.filter((n) => !table.columns.includes(n));
  if (missing.length > 0) {
    throw new CsvError(`missing column(s): ${missing.join(", ")}`);
  }
}

export function numeric(table: ResultTable, column: string): number[] {
  return table.rows.map((row) => {
    const v = Number(row[column]);
    if (!Number.isFinite(v)) {
      throw new CsvError(`non-numeric value '${row[column]}' in ${column}`);
    }
    return v;
  });
}
