// @vitest-environment happy-dom
// DOM-level checks of the grid rendering: marker counts, highlight
// dimming and the tooltip content for interpolated cells.

import { describe, expect, it } from "vitest";

import { INTERPOLATED_MARK, SLICED_MARK, renderGrid, tooltipText } from "../src/render.js";
import { applyConstraints, initialState, loadDocument } from "../src/store.js";
import { CellResult, GridDocument, cellKey } from "../src/types.js";

function sixteenGrid(slicedKeys: Set<string>): GridDocument {
  const cells = new Map<string, CellResult>();
  for (let r = 0; r < 16; r++) {
    for (let s = 0; s < 16; s++) {
      const key = cellKey(r, s);
      const sliced = slicedKeys.has(key);
      cells.set(key, {
        timeS: 60 * (r + 1) + s,
        materialMm3: 10 * (r + 1) + s,
        status: sliced ? "S" : "I",
        accuracyPct: sliced ? undefined : 6.4,
      });
    }
  }
  return {
    modelId: "m",
    printerId: "um3",
    materialId: "pla",
    resolutions: Array.from({ length: 16 }, (_, i) => 0.06 + (i * 0.14) / 15),
    scales: Array.from({ length: 16 }, (_, i) => 1.0 - (i * 0.9) / 15),
    cells,
  };
}

function fiveByFive(): Set<string> {
  const idx = [0, 4, 8, 11, 15];
  const out = new Set<string>();
  for (const r of idx) for (const s of idx) out.add(cellKey(r, s));
  return out;
}

describe("renderGrid", () => {
  it("renders 25 sliced and 231 interpolated markers", () => {
    const state = loadDocument(initialState(), sixteenGrid(fiveByFive()));
    const container = document.createElement("div");
    renderGrid(container, state);
    const sliced = container.querySelectorAll("td.sliced");
    const interpolated = container.querySelectorAll("td.interpolated");
    expect(sliced.length).toBe(25);
    expect(interpolated.length).toBe(231);
    expect(sliced[0].textContent).toBe(SLICED_MARK);
    expect(interpolated[0].textContent).toBe(INTERPOLATED_MARK);
  });

  it("puts the finest profile at 100% in the top-left data cell", () => {
    const state = loadDocument(initialState(), sixteenGrid(fiveByFive()));
    const container = document.createElement("div");
    renderGrid(container, state);
    const firstRow = container.querySelectorAll("tbody tr")[0];
    expect(firstRow.querySelector("th")!.textContent).toBe("0.060 mm");
    const firstCell = firstRow.querySelector("td.cell") as HTMLElement;
    expect(firstCell.dataset.key).toBe("0,0");
    const headers = container.querySelectorAll("thead th");
    expect(headers[1].textContent).toBe("100%");
    expect(headers[16].textContent).toBe("10%");
  });

  it("dims cells outside the constraint bounds", () => {
    let state = loadDocument(initialState(), sixteenGrid(fiveByFive()));
    state = applyConstraints(state, { timeHi: 100 });
    const container = document.createElement("div");
    renderGrid(container, state);
    expect(container.querySelectorAll("td.dimmed").length).toBeGreaterThan(0);
    expect(container.querySelectorAll("td.highlighted").length).toBe(state.highlighted.size);
  });

  it("renders a placeholder for an empty document", () => {
    const container = document.createElement("div");
    renderGrid(container, initialState());
    expect(container.querySelector(".empty-grid")).not.toBeNull();
  });
});

describe("tooltip", () => {
  it("shows accuracy for interpolated cells", () => {
    const state = loadDocument(initialState(), sixteenGrid(fiveByFive()));
    const text = tooltipText(state, "1,1");
    expect(text).toContain("interpolated");
    expect(text).toContain("6.4%");
  });

  it("omits accuracy for sliced cells", () => {
    const state = loadDocument(initialState(), sixteenGrid(fiveByFive()));
    const text = tooltipText(state, "0,0");
    expect(text).toContain("sliced");
    expect(text).not.toContain("%");
  });
});
