// @vitest-environment happy-dom
// End-to-end against a real service instance: add a model, slice three
// interpolated cells, poll the batch, re-fetch the document and check
// that exactly those three cells turned sliced in the rendered grid.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Api } from "../src/api.js";
import { renderGrid } from "../src/render.js";
import { initialState, loadDocument } from "../src/store.js";
import { GridDocument, parseKey } from "../src/types.js";

const PORT = 8900 + Math.floor(Math.random() * 900);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let storeDir: string;
const api = new Api(BASE);

function cubeStl(side = 20): Uint8Array {
  const p: [number, number, number][] = [
    [0, 0, 0], [side, 0, 0], [side, side, 0], [0, side, 0],
    [0, 0, side], [side, 0, side], [side, side, side], [0, side, side],
  ];
  const faces = [
    [0, 2, 1], [0, 3, 2], [4, 5, 6], [4, 6, 7], [0, 1, 5], [0, 5, 4],
    [1, 2, 6], [1, 6, 5], [2, 3, 7], [2, 7, 6], [3, 0, 4], [3, 4, 7],
  ];
  const out = new Uint8Array(84 + 50 * faces.length);
  const view = new DataView(out.buffer);
  view.setUint32(80, faces.length, true);
  faces.forEach((face, t) => {
    const base = 84 + t * 50 + 12;
    face.forEach((vi, k) => {
      view.setFloat32(base + k * 12, p[vi][0], true);
      view.setFloat32(base + k * 12 + 4, p[vi][1], true);
      view.setFloat32(base + k * 12 + 8, p[vi][2], true);
    });
  });
  return out;
}

async function waitForHealth(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/health`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

function slicedKeys(doc: GridDocument): Set<string> {
  const out = new Set<string>();
  for (const [key, cell] of doc.cells) if (cell.status === "S") out.add(key);
  return out;
}

function renderedSlicedKeys(doc: GridDocument): Set<string> {
  const container = document.createElement("div");
  renderGrid(container, loadDocument(initialState(), doc));
  const out = new Set<string>();
  container.querySelectorAll("td.sliced").forEach((td) => {
    out.add((td as HTMLElement).dataset.key!);
  });
  return out;
}

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "slicehub-webui-test-"));
  server = spawn(
    "python3",
    ["-m", "slicehub.cli", "serve", "--store", storeDir, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForHealth();
}, 60000);

afterAll(() => {
  server?.kill();
  rmSync(storeDir, { recursive: true, force: true });
});

describe("slice round-trip against the live service", () => {
  it("converts exactly the three selected cells to sliced", async () => {
    const modelId = await api.addModel(new Blob([cubeStl().buffer as ArrayBuffer]), "testcube", "test", true);
    expect(modelId).toMatch(/^[0-9a-f]{16}$/);

    const { document: before } = await api.download(modelId, "um3", "pla");
    const beforeSliced = renderedSlicedKeys(before);
    expect(beforeSliced.size).toBe(25);

    const targets = [...before.cells.entries()]
      .filter(([, cell]) => cell.status === "I")
      .map(([key]) => key)
      .slice(0, 3);
    expect(targets.length).toBe(3);

    const batchId = await api.startSlice(modelId, {
      cells: targets.map(parseKey),
      share: true,
    });
    const final = await api.pollBatch(batchId, () => undefined, 150);
    expect(final.done).toBe(true);
    expect(final.completed).toBe(3);
    expect(final.failed).toBe(0);

    const { document: after } = await api.download(modelId, "um3", "pla");
    const afterSliced = renderedSlicedKeys(after);
    expect(afterSliced.size).toBe(28);
    for (const key of targets) {
      expect(beforeSliced.has(key)).toBe(false);
      expect(afterSliced.has(key)).toBe(true);
    }
    // nothing else changed status
    for (const key of afterSliced) {
      if (!targets.includes(key)) expect(beforeSliced.has(key)).toBe(true);
    }
  }, 90000);

  it("search returns the model with a preview", async () => {
    const models = await api.search("testcube", "um3", "pla");
    expect(models.length).toBe(1);
    expect(models[0].preview).not.toBeNull();
    expect(models[0].preview!.print_time_s).toBeGreaterThan(0);
  }, 30000);

  it("unshared slicing returns results without persisting them", async () => {
    const models = await api.search("testcube", "um3", "pla");
    const modelId = models[0].model_id;
    const { document: current } = await api.download(modelId, "um3", "pla");
    const target = [...current.cells.entries()].find(([, cell]) => cell.status === "I");
    expect(target).toBeDefined();
    const batchId = await api.startSlice(modelId, {
      cells: [parseKey(target![0])],
      share: false,
    });
    const final = await api.pollBatch(batchId, () => undefined, 150);
    expect(final.results?.length).toBe(1);
    const { document: after } = await api.download(modelId, "um3", "pla");
    expect(after.cells.get(target![0])!.status).toBe("I");
  }, 90000);
});
