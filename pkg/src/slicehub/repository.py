"""Persistent store of models and their slicing metadata.

Layout on disk, mirroring a one-folder-per-model object store:

    <store>/index.json                          global index
    <store>/models/<id>/model.stl               geometry
    <store>/models/<id>/meta-<printer>-<material>.json

Model identity is the content hash of the STL bytes, so identical uploads
map to one id. All writes to a given model's documents and to its index
entry pass through a per-model exclusive section; index and document files
are written atomically (tmp + rename). Gcode never enters the store.
"""

from __future__ import annotations

import hashlib
import io
import json
import re
import threading
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import ParallelismOutOfRange, RejectedInterpolated, UnknownModel
from .geometry import TriangleMesh, parse_stl
from .grid import (
    DEFAULT_GRID_SIZE,
    DEFAULT_SLICE_FRACTION,
    CellIndex,
    SliceGrid,
    build_axes,
    place_samples,
)
from .interpolation import interpolate_grid
from .metadata import MetadataDocument
from .orchestrator import MAX_PARALLELISM, Orchestrator, SliceJob, merge_results
from .slicers import (
    ResultStatus,
    SliceRequest,
    SlicerBackend,
    SlicingResult,
    SyntheticSlicer,
    profile_for_layer_height,
)

PREVIEW_RESOLUTION_MM = 0.15
PREVIEW_SCALE = 1.0

# Modest builtin catalog: seven common FDM materials across a few printers.
DEFAULT_MATERIALS = ["pla", "abs", "petg", "nylon", "cpe", "pc", "tpu"]
DEFAULT_PRINTERS = {
    "um3": {"name": "Ultimaker 3", "materials": DEFAULT_MATERIALS},
    "ums5": {"name": "Ultimaker S5", "materials": DEFAULT_MATERIALS},
    "generic-fdm": {"name": "Generic FDM", "materials": DEFAULT_MATERIALS},
}

_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")

# Fixed timestamp for zip entries so archives are reproducible byte for byte.
_ZIP_DATE = (2020, 1, 1, 0, 0, 0)


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _check_id(value: str, what: str) -> str:
    if not _ID_PATTERN.match(value):
        raise ValueError(f"{what} {value!r} must match [A-Za-z0-9_-]+")
    return value


@dataclass
class ModelIndexEntry:
    model_id: str
    name: str
    tags: list[str] = field(default_factory=list)
    download_count: int = 0
    available_combos: list[tuple[str, str]] = field(default_factory=list)
    created_at: str = field(default_factory=_utcnow_iso)

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "name": self.name,
            "tags": self.tags,
            "download_count": self.download_count,
            "available_combos": [list(combo) for combo in self.available_combos],
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelIndexEntry":
        return cls(
            model_id=data["model_id"],
            name=data["name"],
            tags=list(data.get("tags", [])),
            download_count=int(data.get("download_count", 0)),
            available_combos=[tuple(c) for c in data.get("available_combos", [])],
            created_at=data.get("created_at", ""),
        )


class Repository:
    """Filesystem-backed model store with slicing orchestration on top."""

    def __init__(
        self,
        store_dir: str | Path,
        backend: SlicerBackend | None = None,
        orchestrator: Orchestrator | None = None,
        grid_size: int = DEFAULT_GRID_SIZE,
        slice_fraction: float = DEFAULT_SLICE_FRACTION,
        default_printer: str = "um3",
        default_material: str = "pla",
        parallelism: int = 64,
        printers: dict | None = None,
    ):
        self.store_dir = Path(store_dir)
        self.models_dir = self.store_dir / "models"
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self.backend = backend or SyntheticSlicer()
        self.orchestrator = orchestrator or Orchestrator()
        self.grid_size = grid_size
        self.slice_fraction = slice_fraction
        self.default_printer = default_printer
        self.default_material = default_material
        self.parallelism = parallelism
        self.printers = printers or DEFAULT_PRINTERS

        self._index_lock = threading.Lock()
        self._model_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._batch_cells: dict[str, list[CellIndex]] = {}

    # -- locking and file plumbing ------------------------------------

    def _model_lock(self, model_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._model_locks.setdefault(model_id, threading.Lock())

    def _index_path(self) -> Path:
        return self.store_dir / "index.json"

    def _model_dir(self, model_id: str) -> Path:
        return self.models_dir / model_id

    def _stl_path(self, model_id: str) -> Path:
        return self._model_dir(model_id) / "model.stl"

    def _meta_path(self, model_id: str, printer_id: str, material_id: str) -> Path:
        return self._model_dir(model_id) / f"meta-{printer_id}-{material_id}.json"

    @staticmethod
    def _write_atomic(path: Path, data: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    def _load_index(self) -> dict[str, ModelIndexEntry]:
        path = self._index_path()
        if not path.exists():
            return {}
        payload = json.loads(path.read_text())
        return {mid: ModelIndexEntry.from_dict(entry) for mid, entry in payload["models"].items()}

    def _save_index(self, index: dict[str, ModelIndexEntry]) -> None:
        payload = {"schema_version": 1, "models": {mid: e.to_dict() for mid, e in index.items()}}
        self._write_atomic(self._index_path(), json.dumps(payload, separators=(",", ":")).encode())

    def _update_index(self, mutate) -> None:
        with self._index_lock:
            index = self._load_index()
            mutate(index)
            self._save_index(index)

    # -- document access -----------------------------------------------

    def get_document(self, model_id: str, printer_id: str, material_id: str) -> MetadataDocument | None:
        path = self._meta_path(model_id, printer_id, material_id)
        if not path.exists():
            return None
        return MetadataDocument.from_json(path.read_bytes())

    def _persist_document(self, doc: MetadataDocument) -> None:
        self._model_dir(doc.model_id).mkdir(parents=True, exist_ok=True)
        path = self._meta_path(doc.model_id, doc.printer_id, doc.material_id)
        self._write_atomic(path, doc.to_json().encode())
        combo = (doc.printer_id, doc.material_id)

        def add_combo(index):
            entry = index.get(doc.model_id)
            if entry is not None and combo not in entry.available_combos:
                entry.available_combos.append(combo)

        self._update_index(add_combo)

    def model_ids(self) -> list[str]:
        return sorted(self._load_index().keys())

    def get_entry(self, model_id: str) -> ModelIndexEntry:
        entry = self._load_index().get(model_id)
        if entry is None:
            raise UnknownModel(model_id)
        return entry

    # -- slicing pipeline ------------------------------------------------

    def _make_jobs(
        self,
        model_id: str,
        mesh: TriangleMesh,
        axes,
        cells: list[CellIndex],
        printer_id: str,
        material_id: str,
    ) -> list[SliceJob]:
        jobs = []
        for n, (r_idx, s_idx) in enumerate(cells):
            profile = profile_for_layer_height(axes.resolutions[r_idx], printer_id, material_id)
            request = SliceRequest(model_ref=mesh, profile=profile, scale=axes.scales[s_idx])
            jobs.append(SliceJob(job_id=f"{model_id}-{n}", model_id=model_id, request=request))
        return jobs

    @staticmethod
    def _collect(cells: list[CellIndex], jobs: list[SliceJob]) -> list[tuple[CellIndex, SlicingResult]]:
        """Pair each done job with its cell; failed jobs are skipped."""
        return [
            (cell, job.result)
            for cell, job in zip(cells, jobs)
            if job.result is not None
        ]

    def _slice_cells_blocking(
        self, model_id, mesh, axes, cells, printer_id, material_id, parallelism
    ) -> list[tuple[CellIndex, SlicingResult]]:
        jobs = self._make_jobs(model_id, mesh, axes, cells, printer_id, material_id)
        batch_id = self.orchestrator.submit_batch(jobs, parallelism, self.backend)
        self.orchestrator.wait(batch_id)
        return self._collect(cells, self.orchestrator.jobs(batch_id))

    # -- public operations -------------------------------------------------

    def add_model(
        self,
        stl_bytes: bytes,
        name: str,
        tags: list[str] | None = None,
        share: bool = True,
        printer_id: str | None = None,
        material_id: str | None = None,
    ) -> tuple[str, MetadataDocument]:
        """Add a model: slice the default fraction in parallel, interpolate
        the rest, and (when shared) persist model, document and index entry.

        Unshared additions leave the store untouched; the computed document
        is only returned to the caller. Re-uploading identical bytes yields
        the existing model id; an already-present document is reused rather
        than re-sliced.
        """
        printer_id = _check_id(printer_id or self.default_printer, "printer_id")
        material_id = _check_id(material_id or self.default_material, "material_id")
        mesh = parse_stl(stl_bytes)
        model_id = hashlib.sha256(stl_bytes).hexdigest()[:16]

        if share:
            existing = self.get_document(model_id, printer_id, material_id)
            if existing is not None:
                return model_id, existing

        axes = build_axes(self.grid_size, self.grid_size)
        cells = sorted(place_samples(axes, self.slice_fraction))
        parallelism = min(self.parallelism, len(cells))
        results = self._slice_cells_blocking(
            model_id, mesh, axes, cells, printer_id, material_id, parallelism
        )
        grid = merge_results(SliceGrid(axes=axes), results)
        grid = interpolate_grid(grid)
        doc = MetadataDocument.from_grid(model_id, printer_id, material_id, grid)

        if not share:
            return model_id, doc

        with self._model_lock(model_id):
            model_dir = self._model_dir(model_id)
            model_dir.mkdir(parents=True, exist_ok=True)
            stl_path = self._stl_path(model_id)
            if not stl_path.exists():
                self._write_atomic(stl_path, stl_bytes)

            def ensure_entry(index):
                if model_id not in index:
                    index[model_id] = ModelIndexEntry(
                        model_id=model_id, name=name, tags=list(tags or [])
                    )

            self._update_index(ensure_entry)
            self._persist_document(doc)
        return model_id, doc

    def search(
        self, query: str = "", printer_id: str | None = None, material_id: str | None = None
    ) -> list[tuple[ModelIndexEntry, SlicingResult | None]]:
        """Case-insensitive substring/tag search ranked by match quality,
        then download count. The preview is the cell nearest a 0.15 mm
        profile at 100% scale, absent when no document exists."""
        printer_id = printer_id or self.default_printer
        material_id = material_id or self.default_material
        needle = query.strip().lower()
        scored = []
        for entry in self._load_index().values():
            name = entry.name.lower()
            if not needle:
                score = 0
            elif name == needle:
                score = 3
            elif needle in name:
                score = 2
            elif any(needle in tag.lower() for tag in entry.tags):
                score = 1
            else:
                continue
            scored.append((score, entry))
        scored.sort(key=lambda item: (-item[0], -item[1].download_count, item[1].name))
        return [(entry, self._preview(entry.model_id, printer_id, material_id)) for _, entry in scored]

    def _preview(self, model_id: str, printer_id: str, material_id: str) -> SlicingResult | None:
        doc = self.get_document(model_id, printer_id, material_id)
        if doc is None or doc.axes.n_resolutions == 0 or not doc.cells:
            return None
        r_idx = min(
            range(doc.axes.n_resolutions),
            key=lambda i: abs(doc.axes.resolutions[i] - PREVIEW_RESOLUTION_MM),
        )
        s_idx = min(
            range(doc.axes.n_scales), key=lambda i: abs(doc.axes.scales[i] - PREVIEW_SCALE)
        )
        return doc.cells.get((r_idx, s_idx))

    def download(self, model_id: str, printer_id: str | None = None, material_id: str | None = None) -> bytes:
        """A zip of exactly model.stl + meta.json; bumps the download count.

        Models without metadata for the requested combo still download, with
        an empty-axes document standing in for meta.json.
        """
        printer_id = printer_id or self.default_printer
        material_id = material_id or self.default_material
        stl_path = self._stl_path(model_id)
        if not stl_path.exists():
            raise UnknownModel(model_id)
        doc = self.get_document(model_id, printer_id, material_id)
        if doc is None:
            doc = MetadataDocument.empty(model_id, printer_id, material_id)

        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_STORED) as archive:
            archive.writestr(zipfile.ZipInfo("model.stl", date_time=_ZIP_DATE), stl_path.read_bytes())
            archive.writestr(zipfile.ZipInfo("meta.json", date_time=_ZIP_DATE), doc.to_json())

        def bump(index):
            entry = index.get(model_id)
            if entry is not None:
                entry.download_count += 1

        self._update_index(bump)
        return buffer.getvalue()

    def upload_results(
        self,
        model_id: str,
        printer_id: str,
        material_id: str,
        results: list[tuple[CellIndex, SlicingResult]],
    ) -> MetadataDocument:
        """Merge externally sliced cells into the model's document.

        Only sliced-status results are accepted; interpolations are always
        recomputed locally. Merging runs inside the model's exclusive
        section so concurrent uploads cannot lose updates.
        """
        printer_id = _check_id(printer_id, "printer_id")
        material_id = _check_id(material_id, "material_id")
        if not self._stl_path(model_id).exists():
            raise UnknownModel(model_id)
        for _, result in results:
            if result.status is not ResultStatus.SLICED:
                raise RejectedInterpolated("uploads may only contain sliced results")

        with self._model_lock(model_id):
            doc = self.get_document(model_id, printer_id, material_id)
            if doc is None or doc.axes.n_resolutions == 0:
                grid = SliceGrid(axes=build_axes(self.grid_size, self.grid_size))
            else:
                grid = doc.to_grid()
            grid = merge_results(grid, results)
            n_sliced = len(grid.indices_with_status(ResultStatus.SLICED))
            has_gaps = bool(grid.empty_indices()) or bool(
                grid.indices_with_status(ResultStatus.INTERPOLATED)
            )
            if n_sliced >= 3 and has_gaps:
                # refresh interpolated cells so they track the updated fit
                grid = interpolate_grid(grid)
            doc = MetadataDocument.from_grid(model_id, printer_id, material_id, grid)
            self._persist_document(doc)
        return doc

    def start_slice_batch(
        self,
        model_id: str,
        printer_id: str | None = None,
        material_id: str | None = None,
        cells: list[CellIndex] | None = None,
        fraction: float | None = None,
        parallelism: int | None = None,
        share: bool = True,
    ) -> str:
        """Slice the given cells (or a fraction's sub-lattice) in parallel.

        Returns the batch id immediately; when the batch completes its
        results merge into the persisted document (unless share is false,
        in which case nothing is written and callers read the batch jobs).
        """
        printer_id = _check_id(printer_id or self.default_printer, "printer_id")
        material_id = _check_id(material_id or self.default_material, "material_id")
        stl_path = self._stl_path(model_id)
        if not stl_path.exists():
            raise UnknownModel(model_id)
        mesh = parse_stl(stl_path.read_bytes())

        doc = self.get_document(model_id, printer_id, material_id)
        if doc is None or doc.axes.n_resolutions == 0:
            axes = build_axes(self.grid_size, self.grid_size)
            already_sliced: set[CellIndex] = set()
        else:
            axes = doc.axes
            grid = doc.to_grid()
            already_sliced = set(grid.indices_with_status(ResultStatus.SLICED))

        if cells is None:
            target = place_samples(axes, fraction if fraction is not None else self.slice_fraction)
            cells = sorted(target - already_sliced)
        else:
            cells = sorted(set(tuple(c) for c in cells))
        if not cells:
            raise ValueError("no cells left to slice")

        return self._submit_merge_batch(model_id, mesh, axes, cells, printer_id, material_id, parallelism, share)

    def _submit_merge_batch(
        self, model_id, mesh, axes, cells, printer_id, material_id, parallelism, share=True
    ) -> str:
        if parallelism is not None and not (1 <= parallelism <= MAX_PARALLELISM):
            raise ParallelismOutOfRange(f"parallelism {parallelism} outside [1, {MAX_PARALLELISM}]")
        jobs = self._make_jobs(model_id, mesh, axes, cells, printer_id, material_id)
        effective = min(parallelism or self.parallelism, len(jobs))

        def merge_on_complete(done_jobs: list[SliceJob]) -> None:
            results = self._collect(cells, done_jobs)
            if results and share:
                self.upload_results(model_id, printer_id, material_id, results)

        batch_id = self.orchestrator.submit_batch(
            jobs, effective, self.backend, on_complete=merge_on_complete
        )
        self._batch_cells[batch_id] = list(cells)
        return batch_id

    def batch_results(self, batch_id: str) -> list[tuple[CellIndex, SlicingResult]]:
        """Completed (cell, result) pairs for a repository-started batch."""
        cells = self._batch_cells.get(batch_id)
        if cells is None:
            return []
        return self._collect(cells, self.orchestrator.jobs(batch_id))

    def backfill_tick(self, capacity: int) -> list[str]:
        """Fill missing results for popular models first.

        Walks models in descending download count, enqueues slicing jobs
        for each document's non-sliced cells until ``capacity`` jobs have
        been allocated. Returns the started batch ids.
        """
        if capacity <= 0:
            return []
        entries = sorted(
            self._load_index().values(), key=lambda e: (-e.download_count, e.model_id)
        )
        remaining = capacity
        batch_ids = []
        for entry in entries:
            if remaining <= 0:
                break
            for printer_id, material_id in entry.available_combos:
                if remaining <= 0:
                    break
                doc = self.get_document(entry.model_id, printer_id, material_id)
                if doc is None or doc.axes.n_resolutions == 0:
                    continue
                grid = doc.to_grid()
                unsliced = sorted(
                    set(grid.empty_indices()) | set(grid.indices_with_status(ResultStatus.INTERPOLATED))
                )
                if not unsliced:
                    continue
                cells = unsliced[:remaining]
                remaining -= len(cells)
                mesh = parse_stl(self._stl_path(entry.model_id).read_bytes())
                batch_ids.append(
                    self._submit_merge_batch(
                        entry.model_id, mesh, doc.axes, cells, printer_id, material_id, None
                    )
                )
        return batch_ids
