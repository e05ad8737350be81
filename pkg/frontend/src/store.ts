/** Grid view state and its pure transitions.
 *
 * All UI updates funnel through these functions so invariants hold by
 * construction: highlighted cells are always a subset of the document's
 * cells, only interpolated cells are selectable, and sliced cells are
 * never mutated client-side (documents are only ever replaced wholesale
 * by what the server returned). */

import { Bounds, boundsProblem, defaultBounds, filterCells } from "./filter.js";
import { BatchStatus, GridDocument } from "./types.js";

export interface GridViewState {
  document: GridDocument | null;
  bounds: Bounds;
  boundsError: string | null;
  highlighted: Set<string>;
  selected: Set<string>;
  /** The final configuration the user settled on; kept within the
   * highlighted set while constraints are active. */
  chosen: string | null;
  sliderFraction: number;
  share: boolean;
  activeBatchId: string | null;
  batchStatus: BatchStatus | null;
}

export function initialState(): GridViewState {
  return {
    document: null,
    bounds: {},
    boundsError: null,
    highlighted: new Set(),
    selected: new Set(),
    chosen: null,
    sliderFraction: 0.1,
    share: true,
    activeBatchId: null,
    batchStatus: null,
  };
}

function slicedFraction(doc: GridDocument): number {
  const total = doc.resolutions.length * doc.scales.length;
  if (total === 0) return 0;
  let sliced = 0;
  for (const cell of doc.cells.values()) if (cell.status === "S") sliced++;
  return sliced / total;
}

/** Install a freshly downloaded document; constraint boxes pre-fill with
 * the document's min/max values and everything starts highlighted. */
export function loadDocument(state: GridViewState, doc: GridDocument): GridViewState {
  const bounds = defaultBounds(doc);
  return {
    ...state,
    document: doc,
    bounds,
    boundsError: null,
    highlighted: filterCells(doc, bounds),
    selected: new Set(),
    chosen: null,
    sliderFraction: Math.max(slicedFraction(doc), 0.016),
  };
}

export function applyConstraints(state: GridViewState, bounds: Bounds): GridViewState {
  const problem = boundsProblem(bounds);
  if (problem !== null) {
    return { ...state, bounds, boundsError: problem };
  }
  const highlighted = state.document ? filterCells(state.document, bounds) : new Set<string>();
  const chosen = state.chosen !== null && highlighted.has(state.chosen) ? state.chosen : null;
  return { ...state, bounds, boundsError: null, highlighted, chosen };
}

/** Settle on a configuration; only highlighted cells can be chosen and
 * choosing the same cell again clears the choice. */
export function chooseCell(state: GridViewState, key: string): GridViewState {
  if (!state.document?.cells.has(key) || !state.highlighted.has(key)) return state;
  return { ...state, chosen: state.chosen === key ? null : key };
}

/** Toggle selection of an interpolated cell; sliced cells are not selectable. */
export function toggleSelect(state: GridViewState, key: string): GridViewState {
  const cell = state.document?.cells.get(key);
  if (!cell || cell.status !== "I") return state;
  const selected = new Set(state.selected);
  if (selected.has(key)) selected.delete(key);
  else selected.add(key);
  return { ...state, selected };
}

export function setSlider(state: GridViewState, fraction: number): GridViewState {
  return { ...state, sliderFraction: fraction };
}

export function setShare(state: GridViewState, share: boolean): GridViewState {
  return { ...state, share };
}

export function batchStarted(state: GridViewState, batchId: string): GridViewState {
  return { ...state, activeBatchId: batchId, batchStatus: null };
}

export function batchProgress(state: GridViewState, status: BatchStatus): GridViewState {
  return { ...state, batchStatus: status };
}

/** Replace the document with the server's post-batch version. */
export function batchFinished(state: GridViewState, doc: GridDocument): GridViewState {
  const refreshed = loadDocument(state, doc);
  const highlighted = state.boundsError === null ? filterCells(doc, state.bounds) : new Set<string>();
  return {
    ...refreshed,
    bounds: state.bounds,
    boundsError: state.boundsError,
    highlighted,
    chosen: state.chosen !== null && highlighted.has(state.chosen) ? state.chosen : null,
    activeBatchId: null,
  };
}
