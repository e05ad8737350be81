"""HTTP API over the repository.

Sync endpoints running on FastAPI's worker pool; the repository's
per-model locks provide write serialization. Payloads use the compact
metadata text format. A static frontend directory can be mounted at the
root for the browser client.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .errors import (
    EmptyMesh,
    FractionTooSmall,
    IndexOutOfRange,
    InvertedBound,
    MalformedStl,
    ParallelismOutOfRange,
    RejectedInterpolated,
    SliceHubError,
    UnknownBatch,
    UnknownModel,
)
from .repository import Repository
from .slicers import ResultStatus, SlicingResult

_NOT_FOUND = (UnknownModel, UnknownBatch)
_BAD_REQUEST = (
    MalformedStl,
    EmptyMesh,
    RejectedInterpolated,
    IndexOutOfRange,
    ParallelismOutOfRange,
    InvertedBound,
    FractionTooSmall,
    ValueError,
)


class SliceBody(BaseModel):
    cells: list[tuple[int, int]] | None = None
    fraction: float | None = None
    printer: str | None = None
    material: str | None = None
    parallelism: int | None = None
    share: bool = True


class CellResult(BaseModel):
    r_idx: int
    s_idx: int
    time_s: float = Field(ge=0)
    material_mm3: float = Field(ge=0)
    status: str = "S"


class ResultsBody(BaseModel):
    cells: list[CellResult]


def _doc_payload(doc) -> dict:
    return json.loads(doc.to_json())


def _entry_payload(entry, preview: SlicingResult | None) -> dict:
    payload = entry.to_dict()
    payload["preview"] = (
        None
        if preview is None
        else {
            "print_time_s": preview.print_time_s,
            "material_mm3": preview.material_mm3,
            "status": "S" if preview.status is ResultStatus.SLICED else "I",
            "accuracy_pct": preview.accuracy_pct,
        }
    )
    return payload


def create_app(
    repo: Repository,
    static_dir: str | Path | None = None,
    backfill_interval_s: float = 0.0,
    backfill_capacity: int = 256,
) -> FastAPI:
    app = FastAPI(title="slicehub")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(SliceHubError)
    async def handle_domain_error(request: Request, exc: SliceHubError):
        status = 404 if isinstance(exc, _NOT_FOUND) else 400
        return JSONResponse(status_code=status, content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/printers")
    def printers():
        return {
            "printers": [
                {"printer_id": pid, "name": info["name"], "materials": info["materials"]}
                for pid, info in repo.printers.items()
            ],
            "default_printer": repo.default_printer,
            "default_material": repo.default_material,
            "grid_size": repo.grid_size,
            "slice_fraction": repo.slice_fraction,
        }

    @app.get("/api/models")
    def search(q: str = "", printer: str | None = None, material: str | None = None):
        matches = repo.search(q, printer, material)
        return {"models": [_entry_payload(entry, preview) for entry, preview in matches]}

    @app.post("/api/models")
    def add_model(
        stl: UploadFile,
        name: str = Form(...),
        tags: str = Form(""),
        share: bool = Form(True),
        printer: str | None = Form(None),
        material: str | None = Form(None),
    ):
        tag_list = [t.strip() for t in tags.split(",") if t.strip()]
        model_id, doc = repo.add_model(
            stl.file.read(), name=name, tags=tag_list, share=share,
            printer_id=printer, material_id=material,
        )
        return {"model_id": model_id, "shared": share, "document": _doc_payload(doc)}

    @app.get("/api/models/{model_id}/download")
    def download(model_id: str, printer: str | None = None, material: str | None = None):
        payload = repo.download(model_id, printer, material)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={"Content-Disposition": f'attachment; filename="{model_id}.zip"'},
        )

    @app.post("/api/models/{model_id}/results")
    def upload_results(
        model_id: str, body: ResultsBody, printer: str | None = None, material: str | None = None
    ):
        results = [
            (
                (cell.r_idx, cell.s_idx),
                SlicingResult(
                    print_time_s=cell.time_s,
                    material_mm3=cell.material_mm3,
                    status=ResultStatus.SLICED if cell.status == "S" else ResultStatus.INTERPOLATED,
                    accuracy_pct=None if cell.status == "S" else 0.0,
                ),
            )
            for cell in body.cells
        ]
        doc = repo.upload_results(
            model_id, printer or repo.default_printer, material or repo.default_material, results
        )
        return _doc_payload(doc)

    @app.post("/api/models/{model_id}/slice")
    def start_slice(model_id: str, body: SliceBody):
        batch_id = repo.start_slice_batch(
            model_id,
            printer_id=body.printer,
            material_id=body.material,
            cells=body.cells,
            fraction=body.fraction,
            parallelism=body.parallelism,
            share=body.share,
        )
        return {"batch_id": batch_id}

    @app.get("/api/batches/{batch_id}")
    def batch_status(batch_id: str):
        status = repo.orchestrator.status(batch_id)
        done = status.completed + status.failed == status.total
        payload = {
            "total": status.total,
            "completed": status.completed,
            "failed": status.failed,
            "eta_s": status.eta_s,
            "started_at": status.started_at,
            "done": done,
        }
        if done:
            repo.orchestrator.wait(batch_id)  # let the merge callback finish
            payload["results"] = [
                [r_idx, s_idx, result.print_time_s, result.material_mm3, "S"]
                for (r_idx, s_idx), result in repo.batch_results(batch_id)
            ]
        return payload

    if backfill_interval_s > 0:
        stop = threading.Event()

        def backfill_loop():
            while not stop.wait(backfill_interval_s):
                try:
                    repo.backfill_tick(backfill_capacity)
                except Exception:  # keep the worker alive
                    pass

        @app.on_event("startup")
        def start_backfill():
            threading.Thread(target=backfill_loop, name="slicehub-backfill", daemon=True).start()

        @app.on_event("shutdown")
        def stop_backfill():
            stop.set()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="frontend")

    return app
