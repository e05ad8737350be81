"""Command line interface.

Store directory and port default from the SLICEHUB_STORE / SLICEHUB_PORT
environment variables. The eval subcommands write a CSV and render the
matching trend figure (PNG) next to it.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from .evalharness import (
    constraint_error_experiment,
    generate_corpus,
    interpolation_error_experiment,
    write_reports_csv,
)
from .repository import Repository
from .slicers import ResultStatus

DEFAULT_STORE = os.environ.get("SLICEHUB_STORE", "./slicehub-store")
DEFAULT_PORT = int(os.environ.get("SLICEHUB_PORT", "8080"))
POLL_INTERVAL_S = 1.0


def _add_store_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", default=DEFAULT_STORE, help="store directory (env SLICEHUB_STORE)")


def _repo(args: argparse.Namespace) -> Repository:
    kwargs = {}
    if getattr(args, "grid_size", None):
        kwargs["grid_size"] = args.grid_size
    if getattr(args, "fraction", None):
        kwargs["slice_fraction"] = args.fraction
    return Repository(args.store, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicehub")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    _add_store_arg(serve)
    serve.add_argument("--port", type=int, default=DEFAULT_PORT, help="env SLICEHUB_PORT")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--grid-size", type=int, default=None, dest="grid_size")
    serve.add_argument("--backfill-interval", type=float, default=0.0,
                       help="seconds between backfill ticks (0 disables)")
    serve.add_argument("--backfill-capacity", type=int, default=256)
    serve.add_argument("--frontend", default=None, help="static frontend directory to mount at /")

    add = sub.add_parser("add", help="add an STL to the repository")
    _add_store_arg(add)
    add.add_argument("stl", help="path to the STL file")
    add.add_argument("--name", default=None, help="display name (defaults to the file stem)")
    add.add_argument("--tags", default="", help="comma-separated tags")
    add.add_argument("--no-share", action="store_true", help="compute results without persisting")
    add.add_argument("--printer", default=None)
    add.add_argument("--material", default=None)
    add.add_argument("--fraction", type=float, default=None)

    slice_cmd = sub.add_parser("slice", help="slice missing cells of a stored model")
    _add_store_arg(slice_cmd)
    slice_cmd.add_argument("model_id")
    slice_cmd.add_argument("--fraction", type=float, default=0.1)
    slice_cmd.add_argument("--parallelism", type=int, default=64)
    slice_cmd.add_argument("--printer", default=None)
    slice_cmd.add_argument("--material", default=None)

    backfill = sub.add_parser("backfill", help="fill missing results, popular models first")
    _add_store_arg(backfill)
    backfill.add_argument("--capacity", type=int, default=256)

    eval_cmd = sub.add_parser("eval", help="run the evaluation experiments")
    eval_sub = eval_cmd.add_subparsers(dest="experiment", required=True)

    constraints = eval_sub.add_parser("constraints", help="grid size vs constraint-match error")
    constraints.add_argument("--models", type=int, default=20)
    constraints.add_argument("--sizes", default="2,3,5,9,17,31")
    constraints.add_argument("--constraints", type=int, default=20)
    constraints.add_argument("--seed", type=int, default=42)
    constraints.add_argument("--out", default="fig9.csv")

    interp = eval_sub.add_parser("interp", help="sliced fraction vs interpolation error")
    interp.add_argument("--models", type=int, default=20)
    interp.add_argument("--sublattices", default="2,3,5,9,16")
    interp.add_argument("--seed", type=int, default=42)
    interp.add_argument("--out", default="fig10.csv")

    return parser


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    repo = _repo(args)
    app = create_app(
        repo,
        static_dir=args.frontend,
        backfill_interval_s=args.backfill_interval,
        backfill_capacity=args.backfill_capacity,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _cmd_add(args) -> int:
    stl_path = Path(args.stl)
    repo = _repo(args)
    model_id, doc = repo.add_model(
        stl_path.read_bytes(),
        name=args.name or stl_path.stem,
        tags=[t.strip() for t in args.tags.split(",") if t.strip()],
        share=not args.no_share,
        printer_id=args.printer,
        material_id=args.material,
    )
    sliced = doc.count_with_status(ResultStatus.SLICED)
    interpolated = doc.count_with_status(ResultStatus.INTERPOLATED)
    print(f"model {model_id}: {sliced} sliced, {interpolated} interpolated"
          + ("" if not args.no_share else " (not shared)"))
    return 0


def _watch_batches(repo: Repository, batch_ids: list[str]) -> None:
    for batch_id in batch_ids:
        while True:
            status = repo.orchestrator.status(batch_id)
            done = status.completed + status.failed
            eta = f", eta {status.eta_s:.0f}s" if status.eta_s else ""
            print(f"\rbatch {batch_id}: {done}/{status.total}{eta}   ", end="", flush=True)
            if done == status.total:
                break
            time.sleep(POLL_INTERVAL_S)
        repo.orchestrator.wait(batch_id)
        print()


def _cmd_slice(args) -> int:
    repo = _repo(args)
    batch_id = repo.start_slice_batch(
        args.model_id,
        printer_id=args.printer,
        material_id=args.material,
        fraction=args.fraction,
        parallelism=args.parallelism,
    )
    _watch_batches(repo, [batch_id])
    return 0


def _cmd_backfill(args) -> int:
    repo = _repo(args)
    batch_ids = repo.backfill_tick(args.capacity)
    if not batch_ids:
        print("nothing to backfill")
        return 0
    _watch_batches(repo, batch_ids)
    return 0


def _cmd_eval(args) -> int:
    from .plots import plot_reports

    corpus = generate_corpus(args.models, args.seed)
    if args.experiment == "constraints":
        sizes = [int(s) for s in args.sizes.split(",")]
        reports = constraint_error_experiment(corpus, sizes, args.constraints, args.seed)
        title = "constraint-match error vs grid size"
        xlabel = "grid size"
    else:
        sublattices = [int(s) for s in args.sublattices.split(",")]
        reports = interpolation_error_experiment(corpus, sublattices, args.seed)
        title = "interpolation error vs sliced sub-lattice"
        xlabel = "sliced sub-lattice"
    out = Path(args.out)
    write_reports_csv(reports, out)
    figure = plot_reports(reports, out.with_suffix(".png"), title, xlabel)
    for report in reports:
        print(
            f"{report.condition}: time {report.mean_relative_error_time_pct:.2f}% "
            f"material {report.mean_relative_error_material_pct:.2f}%"
        )
    print(f"wrote {out} and {figure}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": _cmd_serve,
        "add": _cmd_add,
        "slice": _cmd_slice,
        "backfill": _cmd_backfill,
        "eval": _cmd_eval,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
