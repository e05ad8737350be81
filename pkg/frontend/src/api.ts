/** Thin wrappers over the repository HTTP API. */

import { readZip } from "./zip.js";
import {
  BatchStatus,
  GridDocument,
  ModelEntry,
  PrinterInfo,
  WireDocument,
  decodeDocument,
} from "./types.js";

export class Api {
  constructor(readonly baseUrl: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = ((await response.json()) as { detail?: string }).detail ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new Error(`${response.status}: ${detail}`);
    }
    return (await response.json()) as T;
  }

  async printers(): Promise<{ printers: PrinterInfo[]; default_printer: string; default_material: string }> {
    return this.json("/api/printers");
  }

  async search(query: string, printer: string, material: string): Promise<ModelEntry[]> {
    const params = new URLSearchParams({ q: query, printer, material });
    const payload = await this.json<{ models: ModelEntry[] }>(`/api/models?${params}`);
    return payload.models;
  }

  /** Download the model's zip and split it into geometry + document. */
  async download(
    modelId: string,
    printer: string,
    material: string,
  ): Promise<{ stl: Uint8Array; document: GridDocument }> {
    const params = new URLSearchParams({ printer, material });
    const response = await fetch(`${this.baseUrl}/api/models/${modelId}/download?${params}`);
    if (!response.ok) throw new Error(`download failed: ${response.status}`);
    const entries = readZip(new Uint8Array(await response.arrayBuffer()));
    const stl = entries.get("model.stl");
    const meta = entries.get("meta.json");
    if (!stl || !meta) throw new Error("archive must contain model.stl and meta.json");
    const wire = JSON.parse(new TextDecoder().decode(meta)) as WireDocument;
    return { stl, document: decodeDocument(wire) };
  }

  async addModel(stl: Blob, name: string, tags: string, share: boolean): Promise<string> {
    const form = new FormData();
    form.append("stl", stl, "model.stl");
    form.append("name", name);
    form.append("tags", tags);
    form.append("share", share ? "true" : "false");
    const payload = await this.json<{ model_id: string }>("/api/models", {
      method: "POST",
      body: form,
    });
    return payload.model_id;
  }

  async startSlice(
    modelId: string,
    options: {
      cells?: [number, number][];
      fraction?: number;
      printer?: string;
      material?: string;
      parallelism?: number;
      share?: boolean;
    },
  ): Promise<string> {
    const payload = await this.json<{ batch_id: string }>(`/api/models/${modelId}/slice`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
    return payload.batch_id;
  }

  async batchStatus(batchId: string): Promise<BatchStatus> {
    return this.json(`/api/batches/${batchId}`);
  }

  /** Poll a batch (1 s default) until every job finished, reporting
   * progress along the way; polling never blocks the caller's UI. */
  pollBatch(
    batchId: string,
    onProgress: (status: BatchStatus) => void,
    intervalMs = 1000,
  ): Promise<BatchStatus> {
    return new Promise((resolve, reject) => {
      const tick = async () => {
        try {
          const status = await this.batchStatus(batchId);
          onProgress(status);
          if (status.done) {
            clearInterval(timer);
            resolve(status);
          }
        } catch (error) {
          clearInterval(timer);
          reject(error);
        }
      };
      const timer = setInterval(tick, intervalMs);
      void tick();
    });
  }
}
