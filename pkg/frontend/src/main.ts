/** Application wiring: search panel, model preview, trade-off grid,
 * constraint boxes, slice/interpolation slider and batch progress. */

import { Api } from "./api.js";
import { Bounds } from "./filter.js";
import { additionalCells } from "./place.js";
import {
  createTooltip,
  hideTooltip,
  moveTooltip,
  renderGrid,
  tooltipText,
} from "./render.js";
import { parseStl } from "./stl.js";
import {
  GridViewState,
  applyConstraints,
  batchFinished,
  batchProgress,
  batchStarted,
  chooseCell,
  initialState,
  loadDocument,
  setShare,
  setSlider,
  toggleSelect,
} from "./store.js";
import { BatchStatus, ModelEntry, parseKey } from "./types.js";

const api = new Api("");
let state: GridViewState = initialState();
let currentModelId: string | null = null;
let printer = "um3";
let material = "pla";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

function setState(next: GridViewState): void {
  state = next;
  redraw();
}

function redraw(): void {
  renderGrid($("grid"), state, {
    onCellClick: (key) => {
      const cell = state.document?.cells.get(key);
      setState(cell?.status === "S" ? chooseCell(state, key) : toggleSelect(state, key));
    },
    onCellHover: (key, event) => {
      if (key && event) moveTooltip(tooltip, tooltipText(state, key), event);
      else hideTooltip(tooltip);
    },
  });
  const doc = state.document;
  const total = doc ? doc.resolutions.length * doc.scales.length : 0;
  let sliced = 0;
  if (doc) for (const cell of doc.cells.values()) if (cell.status === "S") sliced++;
  $("grid-summary").textContent = doc
    ? `${sliced}/${total} sliced, ${total - sliced} interpolated — ${state.highlighted.size} within bounds`
    : "";
  $("bounds-error").textContent = state.boundsError ?? "";
  $<HTMLButtonElement>("slice-selected").disabled = state.selected.size === 0 || !!state.activeBatchId;
  $("selection-info").textContent = state.selected.size
    ? `${state.selected.size} interpolated cell(s) selected`
    : "";
  const chosenPanel = $("chosen-panel");
  if (state.chosen && doc) {
    const [rIdx, sIdx] = parseKey(state.chosen);
    const cell = doc.cells.get(state.chosen)!;
    const params = new URLSearchParams({ printer, material });
    chosenPanel.innerHTML =
      `<b>chosen configuration:</b> ${doc.resolutions[rIdx].toFixed(3)} mm layer at ` +
      `${Math.round(doc.scales[sIdx] * 100)}% scale — ` +
      `${(cell.timeS / 3600).toFixed(2)} h, ${cell.materialMm3.toFixed(0)} mm³ ` +
      (currentModelId
        ? `<a href="/api/models/${currentModelId}/download?${params}" download>download stl + results for slicing</a>`
        : "");
  } else {
    chosenPanel.textContent = "";
  }
  const status = state.batchStatus;
  const progress = $<HTMLProgressElement>("batch-progress");
  if (state.activeBatchId && status) {
    progress.hidden = false;
    progress.max = status.total;
    progress.value = status.completed + status.failed;
    const eta = status.eta_s != null ? ` — about ${Math.ceil(status.eta_s)} s left` : "";
    $("batch-info").textContent = `slicing ${status.completed + status.failed}/${status.total}${eta}`;
  } else if (!state.activeBatchId) {
    progress.hidden = true;
    if (!status) $("batch-info").textContent = "";
  }
}

function toast(message: string): void {
  const el = $("toast");
  el.textContent = message;
  el.classList.add("visible");
  setTimeout(() => el.classList.remove("visible"), 4000);
}

function readBounds(): Bounds {
  const num = (id: string): number | null => {
    const raw = $<HTMLInputElement>(id).value.trim();
    return raw === "" ? null : Number(raw);
  };
  return {
    timeLo: num("time-lo"),
    timeHi: num("time-hi"),
    materialLo: num("material-lo"),
    materialHi: num("material-hi"),
  };
}

function writeBounds(bounds: Bounds): void {
  const put = (id: string, value: number | null | undefined) => {
    $<HTMLInputElement>(id).value = value == null ? "" : String(value);
  };
  put("time-lo", bounds.timeLo);
  put("time-hi", bounds.timeHi);
  put("material-lo", bounds.materialLo);
  put("material-hi", bounds.materialHi);
}

async function openModel(entry: ModelEntry): Promise<void> {
  try {
    const { stl, document: doc } = await api.download(entry.model_id, printer, material);
    currentModelId = entry.model_id;
    $("model-title").textContent = entry.name;
    renderPreviewSafe(stl);
    setState(loadDocument(state, doc));
    writeBounds(state.bounds);
  } catch (error) {
    toast(`could not open model: ${(error as Error).message}`);
  }
}

function renderPreviewSafe(stl: Uint8Array): void {
  try {
    const mesh = parseStl(stl);
    import("./viewer.js").then(({ renderPreview }) =>
      renderPreview($<HTMLCanvasElement>("preview"), mesh),
    );
  } catch {
    toast("preview unavailable for this model");
  }
}

async function runSearch(): Promise<void> {
  try {
    const models = await api.search($<HTMLInputElement>("query").value, printer, material);
    const list = $("results");
    list.textContent = "";
    for (const entry of models) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = entry.name;
      button.addEventListener("click", () => void openModel(entry));
      const info = document.createElement("span");
      info.className = "result-info";
      info.textContent = entry.preview
        ? ` ~${Math.round(entry.preview.print_time_s / 60)} min, ${entry.preview.material_mm3.toFixed(0)} mm³ (0.15 mm, 100%)`
        : " not available";
      item.append(button, info, ` ↓${entry.download_count}`);
      list.appendChild(item);
    }
  } catch (error) {
    toast(`search failed: ${(error as Error).message}`);
  }
}

async function refreshDocument(): Promise<void> {
  if (!currentModelId) return;
  const { document: doc } = await api.download(currentModelId, printer, material);
  setState(batchFinished(state, doc));
}

async function runBatch(cells: [number, number][]): Promise<void> {
  if (!currentModelId || cells.length === 0 || state.activeBatchId) return;
  try {
    const batchId = await api.startSlice(currentModelId, {
      cells,
      printer,
      material,
      share: state.share,
    });
    setState(batchStarted(state, batchId));
    const final = await api.pollBatch(batchId, (status: BatchStatus) =>
      setState(batchProgress(state, status)),
    );
    if (final.failed > 0) toast(`${final.failed} of ${final.total} slicing jobs failed`);
    if (state.share) {
      await refreshDocument();
    } else if (final.results && state.document) {
      // unshared: update only the local copy with the returned results
      const doc = state.document;
      const cellsCopy = new Map(doc.cells);
      for (const [r, s, timeS, materialMm3] of final.results) {
        cellsCopy.set(`${r},${s}`, { timeS, materialMm3, status: "S" });
      }
      setState(batchFinished(state, { ...doc, cells: cellsCopy }));
    }
  } catch (error) {
    setState({ ...state, activeBatchId: null });
    toast(`slicing failed: ${(error as Error).message}`);
  }
}

async function populatePrinters(): Promise<void> {
  const payload = await api.printers();
  printer = payload.default_printer;
  material = payload.default_material;
  const printerSelect = $<HTMLSelectElement>("printer");
  const materialSelect = $<HTMLSelectElement>("material");
  printerSelect.textContent = "";
  for (const info of payload.printers) {
    const option = document.createElement("option");
    option.value = info.printer_id;
    option.textContent = info.name;
    printerSelect.appendChild(option);
  }
  printerSelect.value = printer;
  const fillMaterials = () => {
    const selected = payload.printers.find((p) => p.printer_id === printerSelect.value);
    materialSelect.textContent = "";
    for (const m of selected?.materials ?? []) {
      const option = document.createElement("option");
      option.value = m;
      option.textContent = m;
      materialSelect.appendChild(option);
    }
    materialSelect.value = selected?.materials.includes(material)
      ? material
      : (selected?.materials[0] ?? "");
  };
  fillMaterials();
  printerSelect.addEventListener("change", () => {
    printer = printerSelect.value;
    fillMaterials();
    material = materialSelect.value;
    void runSearch();
  });
  materialSelect.addEventListener("change", () => {
    material = materialSelect.value;
    void runSearch();
  });
}

function bindEvents(): void {
  $("search").addEventListener("click", () => void runSearch());
  $<HTMLInputElement>("query").addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") void runSearch();
  });
  for (const id of ["time-lo", "time-hi", "material-lo", "material-hi"]) {
    $<HTMLInputElement>(id).addEventListener("input", () =>
      setState(applyConstraints(state, readBounds())),
    );
  }
  $<HTMLInputElement>("share").addEventListener("change", (event) =>
    setState(setShare(state, (event.target as HTMLInputElement).checked)),
  );
  $("slice-selected").addEventListener("click", () => {
    const cells = [...state.selected].map(parseKey);
    void runBatch(cells);
  });
  const slider = $<HTMLInputElement>("slider");
  slider.addEventListener("input", () => {
    const fraction = Number(slider.value) / 100;
    setState(setSlider(state, fraction));
    if (state.document) {
      const extra = additionalCells(state.document, Math.max(fraction, 0.016));
      $("slider-info").textContent = `${Math.round(fraction * 100)}% sliced → ${extra.length} additional cells`;
    }
  });
  slider.addEventListener("change", () => {
    if (!state.document) return;
    const extra = additionalCells(state.document, Math.max(state.sliderFraction, 0.016));
    void runBatch(extra);
  });
  $<HTMLInputElement>("upload").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      const modelId = await api.addModel(file, file.name.replace(/\.stl$/i, ""), "", state.share);
      toast(`model added: ${modelId}`);
      await runSearch();
    } catch (error) {
      toast(`upload failed: ${(error as Error).message}`);
    } finally {
      input.value = "";
    }
  });
}

const tooltip = createTooltip();

void (async () => {
  try {
    await populatePrinters();
    await runSearch();
  } catch (error) {
    toast(`service unreachable: ${(error as Error).message}`);
  }
  bindEvents();
  redraw();
})();
