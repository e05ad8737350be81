#!/usr/bin/env python3
"""Generate parity fixtures for the frontend tests.

The client must reproduce the server's filtering, default-bounds and
sample-placement behavior exactly; these fixtures freeze the server's
answers for randomized inputs so the TypeScript side can be checked
without a running service.
"""

import base64
import json
import sys
from pathlib import Path

import numpy as np

from slicehub.grid import ConstraintSet, SliceGrid, build_axes, default_bounds, filter_cells, place_samples
from slicehub.metadata import MetadataDocument
from slicehub.slicers import ResultStatus, SlicingResult

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def random_document(rng, index):
    n_res = int(rng.integers(2, 17))
    n_scales = int(rng.integers(2, 17))
    grid = SliceGrid(axes=build_axes(n_res, n_scales))
    for i in range(n_res):
        for j in range(n_scales):
            if rng.random() < 0.92:
                interpolated = rng.random() < 0.4
                grid.cells[i][j] = SlicingResult(
                    print_time_s=float(np.round(rng.uniform(0, 5000), 1)),
                    material_mm3=float(np.round(rng.uniform(0, 2000), 1)),
                    status=ResultStatus.INTERPOLATED if interpolated else ResultStatus.SLICED,
                    accuracy_pct=float(np.round(rng.uniform(0, 30), 1)) if interpolated else None,
                )
    return MetadataDocument.from_grid(f"model-{index}", "um3", "pla", grid), grid


def maybe_bound(rng, lo, hi):
    if rng.random() < 0.25:
        return None
    return float(np.round(rng.uniform(lo, hi), 1))


def filter_cases(rng, n_cases=50):
    cases = []
    for index in range(n_cases):
        doc, grid = random_document(rng, index)
        lo_t, hi_t = sorted(rng.uniform(0, 5000, size=2))
        lo_m, hi_m = sorted(rng.uniform(0, 2000, size=2))
        bounds = {
            "timeLo": maybe_bound(rng, 0, lo_t),
            "timeHi": maybe_bound(rng, hi_t, 5000),
            "materialLo": maybe_bound(rng, 0, lo_m),
            "materialHi": maybe_bound(rng, hi_m, 2000),
        }
        constraints = ConstraintSet(
            time_lo_s=bounds["timeLo"],
            time_hi_s=bounds["timeHi"],
            material_lo=bounds["materialLo"],
            material_hi=bounds["materialHi"],
        )
        expected = sorted(f"{r},{s}" for r, s in filter_cells(grid, constraints))
        db = default_bounds(grid) if list(grid.populated()) else None
        cases.append(
            {
                "document": json.loads(doc.to_json()),
                "bounds": bounds,
                "expected_highlight": expected,
                "default_bounds": None
                if db is None
                else {
                    "timeLo": db.time_lo_s,
                    "timeHi": db.time_hi_s,
                    "materialLo": db.material_lo,
                    "materialHi": db.material_hi,
                },
            }
        )
    return cases


def placement_cases(rng, n_cases=30):
    cases = []
    fixed = [(16, 16, 0.10), (16, 16, 1.0), (16, 16, 0.016), (16, 16, 0.5), (8, 12, 0.25)]
    for n_res, n_scales, fraction in fixed:
        cells = sorted(place_samples(build_axes(n_res, n_scales), fraction))
        cases.append(
            {
                "n_resolutions": n_res,
                "n_scales": n_scales,
                "fraction": fraction,
                "expected": [f"{r},{s}" for r, s in cells],
            }
        )
    while len(cases) < n_cases:
        n_res = int(rng.integers(2, 20))
        n_scales = int(rng.integers(2, 20))
        fraction = float(rng.uniform(4.0 / (n_res * n_scales), 1.0))
        try:
            cells = sorted(place_samples(build_axes(n_res, n_scales), fraction))
        except Exception:
            continue
        cases.append(
            {
                "n_resolutions": n_res,
                "n_scales": n_scales,
                "fraction": fraction,
                "expected": [f"{r},{s}" for r, s in cells],
            }
        )
    return cases


def sample_zip():
    import io
    import struct
    import zipfile

    # small deterministic STL: one tetrahedron
    tris = [
        ((0, 0, 0), (10, 0, 0), (0, 10, 0)),
        ((0, 0, 0), (0, 0, 10), (10, 0, 0)),
        ((0, 0, 0), (0, 10, 0), (0, 0, 10)),
        ((10, 0, 0), (0, 0, 10), (0, 10, 0)),
    ]
    blob = bytearray(b"fixture".ljust(80, b"\0"))
    blob += struct.pack("<I", len(tris))
    for tri in tris:
        blob += struct.pack("<3f", 0, 0, 0)
        for v in tri:
            blob += struct.pack("<3f", *v)
        blob += struct.pack("<H", 0)

    grid = SliceGrid(axes=build_axes(2, 2))
    grid.cells[0][0] = SlicingResult(100.0, 50.0)
    grid.cells[1][1] = SlicingResult(10.0, 5.0, ResultStatus.INTERPOLATED, accuracy_pct=7.5)
    doc = MetadataDocument.from_grid("fixturemodel", "um3", "pla", grid)

    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", compression=zipfile.ZIP_STORED) as archive:
        archive.writestr(zipfile.ZipInfo("model.stl", date_time=(2020, 1, 1, 0, 0, 0)), bytes(blob))
        archive.writestr(zipfile.ZipInfo("meta.json", date_time=(2020, 1, 1, 0, 0, 0)), doc.to_json())
    return {
        "zip_base64": base64.b64encode(buffer.getvalue()).decode(),
        "stl_triangles": len(tris),
        "document": json.loads(doc.to_json()),
    }


def main():
    rng = np.random.default_rng(20260810)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "filter_parity.json").write_text(json.dumps(filter_cases(rng), indent=None))
    (OUT / "placement_parity.json").write_text(json.dumps(placement_cases(rng), indent=None))
    (OUT / "sample_zip.json").write_text(json.dumps(sample_zip(), indent=None))
    print(f"fixtures written to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
