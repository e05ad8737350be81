/** DOM rendering of the result grid and its tooltip.
 *
 * Orientation follows the trade-off view convention: top-left is the
 * finest profile at full scale (0.06 mm, 100%), bottom-right the coarsest
 * at the smallest scale (0.2 mm, 10%). Sliced and interpolated results
 * get distinct markers; hovering shows time, material and, for
 * interpolated cells, the prediction accuracy. */

import { GridViewState } from "./store.js";
import { cellKey } from "./types.js";

export const SLICED_MARK = "●"; // ●
export const INTERPOLATED_MARK = "◌"; // ◌

export function formatDuration(seconds: number): string {
  if (seconds < 90) return `${seconds.toFixed(0)} s`;
  const hours = Math.floor(seconds / 3600);
  const minutes = Math.round((seconds % 3600) / 60);
  return hours > 0 ? `${hours} h ${minutes} min` : `${minutes} min`;
}

export function tooltipText(state: GridViewState, key: string): string {
  const cell = state.document?.cells.get(key);
  if (!cell) return "not available";
  const lines = [
    `print time: ${formatDuration(cell.timeS)}`,
    `material: ${cell.materialMm3.toFixed(1)} mm³`,
  ];
  if (cell.status === "I") {
    lines.push(`interpolated, accuracy ±${(cell.accuracyPct ?? 0).toFixed(1)}%`);
  } else {
    lines.push("sliced");
  }
  return lines.join("\n");
}

export interface GridHandlers {
  onCellClick?: (key: string) => void;
  onCellHover?: (key: string | null, event?: MouseEvent) => void;
}

export function renderGrid(
  container: HTMLElement,
  state: GridViewState,
  handlers: GridHandlers = {},
): void {
  container.textContent = "";
  const doc = state.document;
  if (!doc || doc.resolutions.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-grid";
    empty.textContent = "no slicing results yet — load a model or start slicing";
    container.appendChild(empty);
    return;
  }

  const table = document.createElement("table");
  table.className = "result-grid";

  const head = table.createTHead().insertRow();
  head.appendChild(document.createElement("th"));
  for (const scale of doc.scales) {
    const th = document.createElement("th");
    th.textContent = `${Math.round(scale * 100)}%`;
    head.appendChild(th);
  }

  const body = table.createTBody();
  doc.resolutions.forEach((resolution, rIdx) => {
    const row = body.insertRow();
    const label = document.createElement("th");
    label.textContent = `${resolution.toFixed(3)} mm`;
    row.appendChild(label);
    doc.scales.forEach((_, sIdx) => {
      const key = cellKey(rIdx, sIdx);
      const cell = doc.cells.get(key);
      const td = row.insertCell();
      td.dataset.key = key;
      if (!cell) {
        td.className = "cell empty";
        return;
      }
      const classes = ["cell", cell.status === "S" ? "sliced" : "interpolated"];
      if (state.highlighted.has(key)) classes.push("highlighted");
      else classes.push("dimmed");
      if (state.selected.has(key)) classes.push("selected");
      if (state.chosen === key) classes.push("chosen");
      td.className = classes.join(" ");
      td.textContent = cell.status === "S" ? SLICED_MARK : INTERPOLATED_MARK;
      if (handlers.onCellClick) td.addEventListener("click", () => handlers.onCellClick!(key));
      if (handlers.onCellHover) {
        td.addEventListener("mousemove", (event) => handlers.onCellHover!(key, event));
        td.addEventListener("mouseleave", () => handlers.onCellHover!(null));
      }
    });
  });
  container.appendChild(table);
}

export function createTooltip(): HTMLDivElement {
  const tooltip = document.createElement("div");
  tooltip.className = "grid-tooltip";
  tooltip.style.position = "fixed";
  tooltip.style.pointerEvents = "none";
  tooltip.style.visibility = "hidden";
  document.body.appendChild(tooltip);
  return tooltip;
}

export function moveTooltip(tooltip: HTMLDivElement, text: string, event: MouseEvent): void {
  tooltip.textContent = text;
  tooltip.style.left = `${event.clientX + 12}px`;
  tooltip.style.top = `${event.clientY + 12}px`;
  tooltip.style.visibility = "visible";
}

export function hideTooltip(tooltip: HTMLDivElement): void {
  tooltip.style.visibility = "hidden";
}
