"""Per-model, per-printer/material metadata documents.

The document holds the full grid of slicing results and is the unit the
repository stores and ships. The wire format is compact JSON: no
pretty-printing, cells as fixed-position arrays, seconds/mm^3/accuracy
rounded to one decimal. A fully sliced 16x16 document stays well under
16 KB this way.

Cell encoding: ``[r_idx, s_idx, time_s, material_mm3, "S"]`` for sliced
cells, ``[r_idx, s_idx, time_s, material_mm3, "I", accuracy_pct]`` for
interpolated ones, sorted by (r_idx, s_idx).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .grid import GridAxes, SliceGrid
from .slicers import ResultStatus, SlicingResult

SCHEMA_VERSION = 1

_STATUS_CODES = {ResultStatus.SLICED: "S", ResultStatus.INTERPOLATED: "I"}
_CODES_STATUS = {code: status for status, code in _STATUS_CODES.items()}


def _round1(value: float) -> float:
    return round(float(value), 1)


@dataclass
class MetadataDocument:
    """Serialized slicing results for one (model, printer, material)."""

    model_id: str
    printer_id: str
    material_id: str
    axes: GridAxes
    cells: dict[tuple[int, int], SlicingResult] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def empty(cls, model_id: str, printer_id: str, material_id: str) -> "MetadataDocument":
        """Axes-less document used when a model has no slicing data yet."""
        return cls(model_id=model_id, printer_id=printer_id, material_id=material_id, axes=GridAxes.empty())

    @classmethod
    def from_grid(
        cls, model_id: str, printer_id: str, material_id: str, grid: SliceGrid
    ) -> "MetadataDocument":
        """Build a document from a grid, rounding values to wire precision."""
        cells = {}
        for (r_idx, s_idx), result in grid.populated():
            cells[(r_idx, s_idx)] = SlicingResult(
                print_time_s=_round1(result.print_time_s),
                material_mm3=_round1(result.material_mm3),
                status=result.status,
                accuracy_pct=_round1(result.accuracy_pct) if result.accuracy_pct is not None else None,
            )
        return cls(
            model_id=model_id, printer_id=printer_id, material_id=material_id, axes=grid.axes, cells=cells
        )

    def to_grid(self) -> SliceGrid:
        grid = SliceGrid(axes=self.axes)
        for (r_idx, s_idx), result in self.cells.items():
            grid.cells[r_idx][s_idx] = result
        return grid

    def count_with_status(self, status: ResultStatus) -> int:
        return sum(1 for result in self.cells.values() if result.status is status)

    @property
    def is_fully_sliced(self) -> bool:
        return (
            self.axes.n_resolutions > 0
            and len(self.cells) == self.axes.n_resolutions * self.axes.n_scales
            and all(r.status is ResultStatus.SLICED for r in self.cells.values())
        )

    def to_json(self) -> str:
        cells = []
        for (r_idx, s_idx) in sorted(self.cells):
            result = self.cells[(r_idx, s_idx)]
            record = [r_idx, s_idx, result.print_time_s, result.material_mm3, _STATUS_CODES[result.status]]
            if result.accuracy_pct is not None:
                record.append(result.accuracy_pct)
            cells.append(record)
        payload = {
            "schema_version": self.schema_version,
            "model_id": self.model_id,
            "printer_id": self.printer_id,
            "material_id": self.material_id,
            "axes": {"resolutions": list(self.axes.resolutions), "scales": list(self.axes.scales)},
            "cells": cells,
        }
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str | bytes) -> "MetadataDocument":
        payload = json.loads(text)
        axes = GridAxes(
            resolutions=tuple(payload["axes"]["resolutions"]),
            scales=tuple(payload["axes"]["scales"]),
        )
        cells: dict[tuple[int, int], SlicingResult] = {}
        for record in payload["cells"]:
            r_idx, s_idx, time_s, material, code = record[:5]
            key = (int(r_idx), int(s_idx))
            if key in cells:
                raise ValueError(f"duplicate cell {key} in metadata document")
            if not (0 <= key[0] < axes.n_resolutions and 0 <= key[1] < axes.n_scales):
                raise ValueError(f"cell {key} outside {axes.n_resolutions}x{axes.n_scales} axes")
            status = _CODES_STATUS[code]
            accuracy = float(record[5]) if len(record) > 5 else None
            cells[key] = SlicingResult(
                print_time_s=float(time_s),
                material_mm3=float(material),
                status=status,
                accuracy_pct=accuracy,
            )
        return cls(
            model_id=payload["model_id"],
            printer_id=payload["printer_id"],
            material_id=payload["material_id"],
            axes=axes,
            cells=cells,
            schema_version=int(payload["schema_version"]),
        )
