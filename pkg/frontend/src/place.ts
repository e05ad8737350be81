/** Sub-lattice sample placement, mirroring the server's rule so the
 * slider can request exactly the additional cells it needs. */

import { GridDocument, cellKey, parseKey } from "./types.js";

/** k indices spread uniformly over range(n), endpoints always included. */
export function sublatticeIndices(n: number, k: number): number[] {
  if (k < 2 || k > n) throw new Error(`need 2 <= k <= n, got k=${k}, n=${n}`);
  const step = (n - 1) / (k - 1);
  const out: number[] = [];
  for (let i = 0; i < k; i++) out.push(Math.floor(i * step + 0.5));
  return out;
}

function bestShape(nRes: number, nScales: number, target: number): [number, number] {
  let best: { key: [number, number, number]; shape: [number, number] } | null = null;
  for (let k = 2; k <= nRes; k++) {
    const mMax = Math.min(nScales, Math.floor(target / k));
    if (mMax < 2) continue;
    const key: [number, number, number] = [k * mMax, -Math.abs(k - mMax), -k];
    if (
      best === null ||
      key[0] > best.key[0] ||
      (key[0] === best.key[0] &&
        (key[1] > best.key[1] || (key[1] === best.key[1] && key[2] > best.key[2])))
    ) {
      best = { key, shape: [k, mMax] };
    }
  }
  if (best === null) throw new Error("fraction admits no 2x2 sub-lattice");
  return best.shape;
}

export function placeSamples(nRes: number, nScales: number, fraction: number): Set<string> {
  if (!(fraction > 0 && fraction <= 1)) throw new Error(`fraction ${fraction} outside (0, 1]`);
  const target = fraction * nRes * nScales;
  if (target < 4) throw new Error("fraction yields fewer than the 4 corner cells");
  const [k, m] = bestShape(nRes, nScales, target);
  const out = new Set<string>();
  for (const r of sublatticeIndices(nRes, k)) {
    for (const s of sublatticeIndices(nScales, m)) out.add(cellKey(r, s));
  }
  return out;
}

/** Cells the slider's target fraction needs that are not sliced yet. */
export function additionalCells(doc: GridDocument, fraction: number): [number, number][] {
  const placement = placeSamples(doc.resolutions.length, doc.scales.length, fraction);
  const extra: [number, number][] = [];
  for (const key of placement) {
    const cell = doc.cells.get(key);
    if (cell === undefined || cell.status !== "S") extra.push(parseKey(key));
  }
  extra.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  return extra;
}
