/** Wire format of the repository's metadata documents and API payloads. */

export type CellStatus = "S" | "I";

/** [r_idx, s_idx, time_s, material_mm3, status, accuracy_pct?] */
export type WireCell =
  | [number, number, number, number, CellStatus]
  | [number, number, number, number, CellStatus, number];

export interface WireDocument {
  schema_version: number;
  model_id: string;
  printer_id: string;
  material_id: string;
  axes: { resolutions: number[]; scales: number[] };
  cells: WireCell[];
}

export interface CellResult {
  timeS: number;
  materialMm3: number;
  status: CellStatus;
  accuracyPct?: number;
}

/** Decoded document keyed by "r,s" cell indices. */
export interface GridDocument {
  modelId: string;
  printerId: string;
  materialId: string;
  resolutions: number[];
  scales: number[];
  cells: Map<string, CellResult>;
}

export interface ModelEntry {
  model_id: string;
  name: string;
  tags: string[];
  download_count: number;
  available_combos: [string, string][];
  created_at: string;
  preview: {
    print_time_s: number;
    material_mm3: number;
    status: CellStatus;
    accuracy_pct: number | null;
  } | null;
}

export interface BatchStatus {
  total: number;
  completed: number;
  failed: number;
  eta_s: number | null;
  started_at: number;
  done: boolean;
  results?: [number, number, number, number, CellStatus][];
}

export interface PrinterInfo {
  printer_id: string;
  name: string;
  materials: string[];
}

export function cellKey(rIdx: number, sIdx: number): string {
  return `${rIdx},${sIdx}`;
}

export function parseKey(key: string): [number, number] {
  const [r, s] = key.split(",");
  return [Number(r), Number(s)];
}

export function decodeDocument(wire: WireDocument): GridDocument {
  const cells = new Map<string, CellResult>();
  for (const record of wire.cells) {
    const [rIdx, sIdx, timeS, materialMm3, status] = record;
    cells.set(cellKey(rIdx, sIdx), {
      timeS,
      materialMm3,
      status,
      accuracyPct: record.length > 5 ? (record[5] as number) : undefined,
    });
  }
  return {
    modelId: wire.model_id,
    printerId: wire.printer_id,
    materialId: wire.material_id,
    resolutions: wire.axes.resolutions,
    scales: wire.axes.scales,
    cells,
  };
}
