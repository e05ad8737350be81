import { describe, expect, it } from "vitest";

import { additionalCells } from "../src/place.js";
import {
  applyConstraints,
  batchFinished,
  chooseCell,
  initialState,
  loadDocument,
  toggleSelect,
} from "../src/store.js";
import { CellResult, GridDocument, cellKey } from "../src/types.js";

function makeDocument(n = 4, interpolated: string[] = []): GridDocument {
  const cells = new Map<string, CellResult>();
  const resolutions = Array.from({ length: n }, (_, i) => 0.06 + (i * 0.14) / (n - 1));
  const scales = Array.from({ length: n }, (_, i) => 1.0 - (i * 0.9) / (n - 1));
  for (let r = 0; r < n; r++) {
    for (let s = 0; s < n; s++) {
      const key = cellKey(r, s);
      const isInterp = interpolated.includes(key);
      cells.set(key, {
        timeS: 100 * r + 10 * s + 5,
        materialMm3: 50 * r + 5 * s + 1,
        status: isInterp ? "I" : "S",
        accuracyPct: isInterp ? 4.2 : undefined,
      });
    }
  }
  return { modelId: "m", printerId: "um3", materialId: "pla", resolutions, scales, cells };
}

describe("loadDocument", () => {
  it("pre-fills constraint boxes with the document min/max", () => {
    const state = loadDocument(initialState(), makeDocument());
    expect(state.bounds.timeLo).toBe(5);
    expect(state.bounds.timeHi).toBe(335);
    expect(state.bounds.materialLo).toBe(1);
    expect(state.bounds.materialHi).toBe(166);
  });

  it("highlights everything at the default bounds", () => {
    const state = loadDocument(initialState(), makeDocument());
    expect(state.highlighted.size).toBe(16);
  });
});

describe("applyConstraints", () => {
  it("recomputes the highlight set with inclusive bounds", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = applyConstraints(state, { timeHi: 115 });
    // cells with time <= 115: r=0 row (5..35) and (1,0)=105, (1,1)=115
    expect(state.highlighted.size).toBe(6);
    expect(state.highlighted.has("1,1")).toBe(true);
    expect(state.highlighted.has("1,2")).toBe(false);
  });

  it("keeps highlighted a subset of the document cells", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = applyConstraints(state, { timeLo: 0, timeHi: 99999 });
    for (const key of state.highlighted) {
      expect(state.document!.cells.has(key)).toBe(true);
    }
  });

  it("flags inverted bounds with an inline error", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = applyConstraints(state, { timeLo: 100, timeHi: 50 });
    expect(state.boundsError).toMatch(/lower bound exceeds/);
  });

  it("zero matches is valid (empty-state, not an error)", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = applyConstraints(state, { timeHi: 1 });
    expect(state.boundsError).toBeNull();
    expect(state.highlighted.size).toBe(0);
  });
});

describe("selection", () => {
  it("only interpolated cells are selectable", () => {
    let state = loadDocument(initialState(), makeDocument(4, ["1,1"]));
    state = toggleSelect(state, "0,0"); // sliced
    expect(state.selected.size).toBe(0);
    state = toggleSelect(state, "1,1"); // interpolated
    expect(state.selected.has("1,1")).toBe(true);
    state = toggleSelect(state, "1,1");
    expect(state.selected.size).toBe(0);
  });
});

describe("slider", () => {
  it("requests only the additional, not-yet-sliced cells", () => {
    // 16x16 document where the 10% (5x5) placement is already sliced
    const n = 16;
    const cells = new Map<string, CellResult>();
    const five = [0, 4, 8, 11, 15];
    for (let r = 0; r < n; r++) {
      for (let s = 0; s < n; s++) {
        const sliced = five.includes(r) && five.includes(s);
        cells.set(cellKey(r, s), {
          timeS: 10,
          materialMm3: 5,
          status: sliced ? "S" : "I",
          accuracyPct: sliced ? undefined : 3,
        });
      }
    }
    const doc: GridDocument = {
      modelId: "m",
      printerId: "um3",
      materialId: "pla",
      resolutions: Array.from({ length: n }, (_, i) => 0.06 + (i * 0.14) / 15),
      scales: Array.from({ length: n }, (_, i) => 1.0 - (i * 0.9) / 15),
      cells,
    };
    const extra = additionalCells(doc, 0.5);
    // 50% of 256 -> 11x11 = 121 cells; the 25 already-sliced 5x5 cells
    // overlap the 11x11 placement where their indices coincide
    const placement121 = 121;
    const overlap = extra.filter(([r, s]) => five.includes(r) && five.includes(s)).length;
    expect(overlap).toBe(0);
    expect(extra.length).toBeLessThan(placement121);
    for (const [r, s] of extra) {
      expect(doc.cells.get(cellKey(r, s))!.status).toBe("I");
    }
  });
});

describe("chooseCell", () => {
  it("only highlighted cells can be the chosen configuration", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = applyConstraints(state, { timeHi: 115 });
    state = chooseCell(state, "3,3"); // outside bounds
    expect(state.chosen).toBeNull();
    state = chooseCell(state, "0,0");
    expect(state.chosen).toBe("0,0");
  });

  it("tightening constraints clears a now-invalid choice", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = chooseCell(state, "3,3");
    expect(state.chosen).toBe("3,3");
    state = applyConstraints(state, { timeHi: 115 });
    expect(state.chosen).toBeNull();
  });

  it("choosing the same cell again clears it", () => {
    let state = loadDocument(initialState(), makeDocument());
    state = chooseCell(state, "1,1");
    state = chooseCell(state, "1,1");
    expect(state.chosen).toBeNull();
  });
});

describe("batchFinished", () => {
  it("replaces the document and keeps user bounds", () => {
    let state = loadDocument(initialState(), makeDocument(4, ["1,1"]));
    state = applyConstraints(state, { timeHi: 115 });
    const next = makeDocument(4, []); // the server re-sliced everything
    state = batchFinished(state, next);
    expect(state.document!.cells.get("1,1")!.status).toBe("S");
    expect(state.bounds.timeHi).toBe(115);
    expect(state.activeBatchId).toBeNull();
  });
});
