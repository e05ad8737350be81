"""Concurrent execution of slicing jobs.

Batches run on a pluggable executor (an in-process thread pool by default;
the factory seam exists so a remote executor can be dropped in). Submission
is non-blocking, status is readable from any thread, and a failed job never
aborts its batch: surviving results still merge. Each job gets a single
retry before it is marked failed.
"""

from __future__ import annotations

import logging
import threading
import time
import uuid
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .errors import IndexOutOfRange, ParallelismOutOfRange, UnknownBatch
from .grid import CellIndex, SliceGrid
from .slicers import ResultStatus, SliceRequest, SlicerBackend, SlicingResult

log = logging.getLogger(__name__)

MAX_PARALLELISM = 1000


class JobState(Enum):
    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass
class SliceJob:
    """One slicing task; result present iff done, error present iff failed."""

    job_id: str
    model_id: str
    request: SliceRequest
    state: JobState = JobState.PENDING
    result: SlicingResult | None = None
    error: str | None = None


@dataclass(frozen=True)
class BatchStatus:
    total: int
    completed: int
    failed: int
    eta_s: float | None
    started_at: float


@dataclass
class _Batch:
    batch_id: str
    jobs: list[SliceJob]
    started_at: float  # wall clock
    started_mono: float  # monotonic, for ETA
    lock: threading.Lock = field(default_factory=threading.Lock)
    done_event: threading.Event = field(default_factory=threading.Event)
    completed: int = 0
    failed: int = 0


def _default_executor_factory(parallelism: int) -> Executor:
    return ThreadPoolExecutor(max_workers=parallelism, thread_name_prefix="slicehub-job")


class Orchestrator:
    """Runs batches of slicing jobs and tracks their progress."""

    def __init__(self, executor_factory: Callable[[int], Executor] | None = None):
        self._executor_factory = executor_factory or _default_executor_factory
        self._batches: dict[str, _Batch] = {}
        self._registry_lock = threading.Lock()

    def submit_batch(
        self,
        jobs: list[SliceJob],
        parallelism: int,
        backend: SlicerBackend,
        on_complete: Callable[[list[SliceJob]], None] | None = None,
    ) -> str:
        """Start executing jobs with at most ``parallelism`` in flight.

        Returns immediately with the batch id. ``on_complete`` runs once in
        a worker thread after every job is done or failed.
        """
        if not (1 <= parallelism <= MAX_PARALLELISM):
            raise ParallelismOutOfRange(f"parallelism {parallelism} outside [1, {MAX_PARALLELISM}]")
        if not jobs:
            raise ValueError("batch needs at least one job")

        batch = _Batch(
            batch_id=uuid.uuid4().hex[:12],
            jobs=list(jobs),
            started_at=time.time(),
            started_mono=time.monotonic(),
        )
        with self._registry_lock:
            self._batches[batch.batch_id] = batch

        executor = self._executor_factory(parallelism)
        futures = [executor.submit(self._run_job, batch, job, backend) for job in batch.jobs]

        def _watch():
            for future in futures:
                future.result()
            executor.shutdown(wait=True)
            if on_complete is not None:
                try:
                    on_complete(batch.jobs)
                except Exception:
                    log.exception("batch %s completion callback failed", batch.batch_id)
            batch.done_event.set()

        threading.Thread(target=_watch, name=f"slicehub-batch-{batch.batch_id}", daemon=True).start()
        return batch.batch_id

    def _run_job(self, batch: _Batch, job: SliceJob, backend: SlicerBackend) -> None:
        job.state = JobState.RUNNING
        error = None
        for _ in range(2):  # one retry
            try:
                job.result = backend.slice(job.request)
                job.state = JobState.DONE
                error = None
                break
            except Exception as exc:
                error = f"{type(exc).__name__}: {exc}"
        if error is not None:
            job.error = error
            job.state = JobState.FAILED
        with batch.lock:
            if job.state is JobState.DONE:
                batch.completed += 1
            else:
                batch.failed += 1

    def _get(self, batch_id: str) -> _Batch:
        with self._registry_lock:
            batch = self._batches.get(batch_id)
        if batch is None:
            raise UnknownBatch(batch_id)
        return batch

    def status(self, batch_id: str) -> BatchStatus:
        """Consistent snapshot of batch progress with a throughput-based ETA."""
        batch = self._get(batch_id)
        with batch.lock:
            completed, failed = batch.completed, batch.failed
        total = len(batch.jobs)
        eta = None
        if completed + failed >= 1:
            elapsed = time.monotonic() - batch.started_mono
            remaining = total - completed - failed
            eta = elapsed * remaining / max(completed, 1)
        return BatchStatus(
            total=total,
            completed=completed,
            failed=failed,
            eta_s=eta,
            started_at=batch.started_at,
        )

    def jobs(self, batch_id: str) -> list[SliceJob]:
        """The batch's jobs in submission order."""
        return list(self._get(batch_id).jobs)

    def wait(self, batch_id: str, timeout: float | None = None) -> bool:
        """Block until the batch finishes; True when it did."""
        return self._get(batch_id).done_event.wait(timeout)


def merge_results(grid: SliceGrid, results: list[tuple[CellIndex, SlicingResult]]) -> SliceGrid:
    """Merge per-cell results into a grid, returning a new grid.

    Sliced results overwrite anything, including older sliced values
    (last-writer wins inside one call, applied in cell-index order with
    arrival order preserved per cell). Interpolated values never overwrite
    a sliced cell.
    """
    n_res, n_scales = grid.axes.n_resolutions, grid.axes.n_scales
    for (r_idx, s_idx), _ in results:
        if not (0 <= r_idx < n_res and 0 <= s_idx < n_scales):
            raise IndexOutOfRange(f"cell ({r_idx}, {s_idx}) outside {n_res}x{n_scales} grid")

    merged = grid.copy()
    ordered = sorted(enumerate(results), key=lambda item: (item[1][0], item[0]))
    for _, ((r_idx, s_idx), result) in ordered:
        current = merged.cells[r_idx][s_idx]
        if (
            result.status is ResultStatus.INTERPOLATED
            and current is not None
            and current.status is ResultStatus.SLICED
        ):
            continue
        merged.cells[r_idx][s_idx] = result
    return merged
