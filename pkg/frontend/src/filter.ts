/** Client-side constraint filtering; must stay in lockstep with the
 * server's rule: inclusive bounds, conjunction over every present bound. */

import { CellResult, GridDocument } from "./types.js";

export interface Bounds {
  timeLo?: number | null;
  timeHi?: number | null;
  materialLo?: number | null;
  materialHi?: number | null;
}

/** Human-readable validation problem, or null when the bounds are usable. */
export function boundsProblem(bounds: Bounds): string | null {
  const values = [bounds.timeLo, bounds.timeHi, bounds.materialLo, bounds.materialHi];
  if (values.some((v) => v != null && (Number.isNaN(v) || v < 0))) {
    return "bounds must be nonnegative numbers";
  }
  if (bounds.timeLo != null && bounds.timeHi != null && bounds.timeLo > bounds.timeHi) {
    return "time lower bound exceeds upper bound";
  }
  if (
    bounds.materialLo != null &&
    bounds.materialHi != null &&
    bounds.materialLo > bounds.materialHi
  ) {
    return "material lower bound exceeds upper bound";
  }
  return null;
}

export function admits(cell: CellResult, bounds: Bounds): boolean {
  if (bounds.timeLo != null && cell.timeS < bounds.timeLo) return false;
  if (bounds.timeHi != null && cell.timeS > bounds.timeHi) return false;
  if (bounds.materialLo != null && cell.materialMm3 < bounds.materialLo) return false;
  if (bounds.materialHi != null && cell.materialMm3 > bounds.materialHi) return false;
  return true;
}

export function filterCells(doc: GridDocument, bounds: Bounds): Set<string> {
  const out = new Set<string>();
  for (const [key, cell] of doc.cells) {
    if (admits(cell, bounds)) out.add(key);
  }
  return out;
}

/** Min/max print time and material across the document, used to pre-fill
 * the constraint boxes on load. */
export function defaultBounds(doc: GridDocument): Bounds {
  let timeLo = Infinity;
  let timeHi = -Infinity;
  let materialLo = Infinity;
  let materialHi = -Infinity;
  for (const cell of doc.cells.values()) {
    timeLo = Math.min(timeLo, cell.timeS);
    timeHi = Math.max(timeHi, cell.timeS);
    materialLo = Math.min(materialLo, cell.materialMm3);
    materialHi = Math.max(materialHi, cell.materialMm3);
  }
  if (!Number.isFinite(timeLo)) {
    return {};
  }
  return { timeLo, timeHi, materialLo, materialHi };
}
