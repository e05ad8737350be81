"""The resolution x scale configuration grid.

Axes are fixed to layer heights spanning [0.06, 0.2] mm (finest first) and
scales spanning [1.00, 0.10] (largest first). Grid refinement follows the
midpoint-insertion cascade 2 -> 3 -> 5 -> 9 -> 17 -> 33 levels per axis;
other level counts (including the nominal 16 and 31) fall back to uniform
spacing between the same endpoints.

Grids are value objects: construction, sample placement and filtering are
pure. Concurrent mutation is not supported; merge serialization is owned
by the repository.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FractionTooSmall, InvertedBound, TooFewLevels
from .slicers import ResultStatus, SlicingResult

RESOLUTION_FINEST_MM = 0.06
RESOLUTION_COARSEST_MM = 0.2
SCALE_MAX = 1.0
SCALE_MIN = 0.1

DEFAULT_GRID_SIZE = 16
DEFAULT_SLICE_FRACTION = 0.10

CellIndex = tuple[int, int]  # (resolution_idx, scale_idx)


@dataclass(frozen=True)
class GridAxes:
    """Axis values: layer heights finest-first, scales largest-first."""

    resolutions: tuple[float, ...]
    scales: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "resolutions", tuple(float(r) for r in self.resolutions))
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        if any(b <= a for a, b in zip(self.resolutions, self.resolutions[1:])):
            raise ValueError("resolutions must be strictly increasing layer heights")
        if any(b >= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly decreasing")

    @classmethod
    def empty(cls) -> "GridAxes":
        return cls(resolutions=(), scales=())

    @property
    def n_resolutions(self) -> int:
        return len(self.resolutions)

    @property
    def n_scales(self) -> int:
        return len(self.scales)


@dataclass(frozen=True)
class ConstraintSet:
    """Optional inclusive bounds on print time (s) and material (mm^3)."""

    time_lo_s: float | None = None
    time_hi_s: float | None = None
    material_lo: float | None = None
    material_hi: float | None = None

    def __post_init__(self):
        for name in ("time_lo_s", "time_hi_s", "material_lo", "material_hi"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.time_lo_s is not None and self.time_hi_s is not None and self.time_lo_s > self.time_hi_s:
            raise InvertedBound("time lower bound exceeds upper bound")
        if self.material_lo is not None and self.material_hi is not None and self.material_lo > self.material_hi:
            raise InvertedBound("material lower bound exceeds upper bound")

    def admits(self, result: SlicingResult) -> bool:
        """Inclusive conjunction over every bound that is present."""
        if self.time_lo_s is not None and result.print_time_s < self.time_lo_s:
            return False
        if self.time_hi_s is not None and result.print_time_s > self.time_hi_s:
            return False
        if self.material_lo is not None and result.material_mm3 < self.material_lo:
            return False
        if self.material_hi is not None and result.material_mm3 > self.material_hi:
            return False
        return True


@dataclass
class SliceGrid:
    """Dense matrix of optional results indexed (resolution_idx, scale_idx)."""

    axes: GridAxes
    cells: list[list[SlicingResult | None]] = field(default_factory=list)

    def __post_init__(self):
        if not self.cells:
            self.cells = [[None] * self.axes.n_scales for _ in range(self.axes.n_resolutions)]
        if len(self.cells) != self.axes.n_resolutions or any(
            len(row) != self.axes.n_scales for row in self.cells
        ):
            raise ValueError("cell matrix dimensions must match axes")

    def get(self, r_idx: int, s_idx: int) -> SlicingResult | None:
        return self.cells[r_idx][s_idx]

    def with_cell(self, r_idx: int, s_idx: int, result: SlicingResult | None) -> "SliceGrid":
        """Copy of this grid with one cell replaced."""
        cells = [row[:] for row in self.cells]
        cells[r_idx][s_idx] = result
        return SliceGrid(axes=self.axes, cells=cells)

    def copy(self) -> "SliceGrid":
        return SliceGrid(axes=self.axes, cells=[row[:] for row in self.cells])

    def populated(self):
        """Yield ((r_idx, s_idx), result) for every non-empty cell."""
        for r_idx, row in enumerate(self.cells):
            for s_idx, result in enumerate(row):
                if result is not None:
                    yield (r_idx, s_idx), result

    def indices_with_status(self, status: ResultStatus) -> list[CellIndex]:
        return [idx for idx, result in self.populated() if result.status is status]

    def empty_indices(self) -> list[CellIndex]:
        return [
            (r_idx, s_idx)
            for r_idx, row in enumerate(self.cells)
            for s_idx, result in enumerate(row)
            if result is None
        ]

    @property
    def n_cells(self) -> int:
        return self.axes.n_resolutions * self.axes.n_scales


def _is_midpoint_count(n: int) -> bool:
    # n is reachable by midpoint insertion (2 -> 2n-1): n-1 is a power of two
    return n >= 2 and (n - 1) & (n - 2) == 0


def _midpoint_cascade(start: float, end: float, n: int) -> list[float]:
    values = [start, end]
    while len(values) < n:
        refined = []
        for a, b in zip(values, values[1:]):
            refined.append(a)
            refined.append((a + b) / 2.0)
        refined.append(values[-1])
        values = refined
    return values


def _axis_values(start: float, end: float, n: int) -> tuple[float, ...]:
    if _is_midpoint_count(n):
        return tuple(_midpoint_cascade(start, end, n))
    return tuple(np.linspace(start, end, n).tolist())


def build_axes(n_resolutions: int, n_scales: int) -> GridAxes:
    """Axes between the fixed endpoints.

    Counts in the midpoint-refinement sequence {2, 3, 5, 9, 17, 33, ...} get
    the exact midpoint cascade; any other count is uniformly spaced.
    """
    if n_resolutions < 2 or n_scales < 2:
        raise TooFewLevels("each axis needs at least 2 levels")
    return GridAxes(
        resolutions=_axis_values(RESOLUTION_FINEST_MM, RESOLUTION_COARSEST_MM, n_resolutions),
        scales=_axis_values(SCALE_MAX, SCALE_MIN, n_scales),
    )


def sublattice_indices(n: int, k: int) -> list[int]:
    """k indices spread uniformly over range(n), endpoints always included."""
    if not (2 <= k <= n):
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    step = (n - 1) / (k - 1)
    return [int(np.floor(i * step + 0.5)) for i in range(k)]


def _best_sublattice_shape(n_res: int, n_scales: int, target: float) -> tuple[int, int]:
    # Largest k*m <= target; ties prefer squarer, then fewer resolution levels.
    best = None
    for k in range(2, n_res + 1):
        m_max = min(n_scales, int(target // k))
        if m_max < 2:
            continue
        candidate = (k, m_max)
        key = (k * m_max, -abs(k - m_max), -k)
        if best is None or key > best[0]:
            best = (key, candidate)
    if best is None:
        raise FractionTooSmall("fraction admits no 2x2 sub-lattice")
    return best[1]


def place_samples(axes: GridAxes, sliced_fraction: float) -> set[CellIndex]:
    """Cells to slice for a target fraction: a sub-lattice uniform per
    dimension, corners always included, size the closest achievable count
    not exceeding the request."""
    if not (0.0 < sliced_fraction <= 1.0):
        raise ValueError(f"sliced fraction {sliced_fraction} outside (0, 1]")
    n_res, n_scales = axes.n_resolutions, axes.n_scales
    target = sliced_fraction * n_res * n_scales
    if target < 4:
        raise FractionTooSmall(
            f"fraction {sliced_fraction} yields {target:.2f} cells; the 4 corners are the minimum"
        )
    k, m = _best_sublattice_shape(n_res, n_scales, target)
    res_indices = sublattice_indices(n_res, k)
    scale_indices = sublattice_indices(n_scales, m)
    return {(ri, si) for ri in res_indices for si in scale_indices}


def filter_cells(grid: SliceGrid, constraints: ConstraintSet) -> set[CellIndex]:
    """Indices of populated cells admitted by every present bound."""
    return {idx for idx, result in grid.populated() if constraints.admits(result)}


def default_bounds(grid: SliceGrid) -> ConstraintSet:
    """Min/max print time and material across all populated cells."""
    results = [result for _, result in grid.populated()]
    if not results:
        raise ValueError("grid has no populated cells; slice or interpolate first")
    times = [r.print_time_s for r in results]
    materials = [r.material_mm3 for r in results]
    return ConstraintSet(
        time_lo_s=min(times),
        time_hi_s=max(times),
        material_lo=min(materials),
        material_hi=max(materials),
    )


__all__ = [
    "CellIndex",
    "ConstraintSet",
    "DEFAULT_GRID_SIZE",
    "DEFAULT_SLICE_FRACTION",
    "GridAxes",
    "SliceGrid",
    "build_axes",
    "default_bounds",
    "filter_cells",
    "place_samples",
    "sublattice_indices",
]
