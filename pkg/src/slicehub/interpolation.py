"""Polynomial surface fitting for missing slicing results.

A total-degree-2 bivariate polynomial over (scale, layer height) is fit to
the sliced cells by least squares, one independent fit per quantity (print
time and material). With fewer than 6 samples, or a rank-deficient
quadratic design, the fit degrades to the 3-term linear basis. The
reported accuracy is leave-one-out cross-validation mean relative error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDesign, TooFewSamples
from .grid import SliceGrid
from .slicers import ResultStatus, SlicingResult

# Singular values below RANK_TOLERANCE (relative to the largest) are
# treated as zero when solving and when deciding degradation.
RANK_TOLERANCE = 1e-10

QUADRATIC_TERMS = 6  # a0 + a1*s + a2*r + a3*s^2 + a4*s*r + a5*r^2
LINEAR_TERMS = 3  # a0 + a1*s + a2*r

SamplePoint = tuple[tuple[float, float], float]  # ((layer_height, scale), value)


@dataclass(frozen=True)
class SurfaceFit:
    """Least-squares polynomial surface over (layer height, scale)."""

    coefficients: tuple[float, ...]
    basis: str  # "quadratic" or "linear"
    n_samples: int
    loocv_error_pct: float


def _design_matrix(r: np.ndarray, s: np.ndarray, n_terms: int) -> np.ndarray:
    columns = [np.ones_like(s), s, r]
    if n_terms == QUADRATIC_TERMS:
        columns += [s * s, s * r, r * r]
    return np.column_stack(columns)


def _solve(design: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, int]:
    coeffs, _, rank, _ = np.linalg.lstsq(design, values, rcond=RANK_TOLERANCE)
    return coeffs, rank


def fit(samples: list[SamplePoint]) -> SurfaceFit:
    """Fit the quadratic surface, degrading to linear when under-sampled.

    Degradation ladder: quadratic (needs >= 6 samples and full rank) ->
    linear -> DegenerateDesign when the points carry no spatial information
    at all. LOOCV refits use the basis chosen for the full fit; relative
    error terms with a zero true value are skipped.
    """
    n = len(samples)
    if n < 3:
        raise TooFewSamples(f"need at least 3 samples, got {n}")
    r = np.array([point[0] for point, _ in samples], dtype=np.float64)
    s = np.array([point[1] for point, _ in samples], dtype=np.float64)
    y = np.array([value for _, value in samples], dtype=np.float64)

    n_terms = QUADRATIC_TERMS if n >= QUADRATIC_TERMS else LINEAR_TERMS
    design = _design_matrix(r, s, n_terms)
    coeffs, rank = _solve(design, y)
    if n_terms == QUADRATIC_TERMS and rank < QUADRATIC_TERMS:
        n_terms = LINEAR_TERMS
        design = _design_matrix(r, s, n_terms)
        coeffs, rank = _solve(design, y)
    if n_terms == LINEAR_TERMS and rank < 2:
        raise DegenerateDesign("sample points are coincident; no surface is determined")

    return SurfaceFit(
        coefficients=tuple(float(c) for c in coeffs),
        basis="quadratic" if n_terms == QUADRATIC_TERMS else "linear",
        n_samples=n,
        loocv_error_pct=_loocv_error_pct(design, y),
    )


def _loocv_error_pct(design: np.ndarray, y: np.ndarray) -> float:
    n = len(y)
    errors = []
    for i in range(n):
        keep = np.arange(n) != i
        coeffs, _ = _solve(design[keep], y[keep])
        if y[i] == 0:
            continue
        predicted = max(0.0, float(design[i] @ coeffs))
        errors.append(abs(predicted - y[i]) / abs(y[i]))
    if not errors:
        return 0.0
    return float(np.mean(errors)) * 100.0


def predict(surface: SurfaceFit, layer_height_mm: float, scale: float) -> float:
    """Evaluate the fitted polynomial, clamped at zero."""
    r, s = layer_height_mm, scale
    c = surface.coefficients
    value = c[0] + c[1] * s + c[2] * r
    if surface.basis == "quadratic":
        value += c[3] * s * s + c[4] * s * r + c[5] * r * r
    return max(0.0, value)


def fit_grid(grid: SliceGrid) -> tuple[SurfaceFit, SurfaceFit]:
    """(time fit, material fit) over the grid's sliced cells."""
    sliced = [(idx, result) for idx, result in grid.populated() if result.status is ResultStatus.SLICED]
    if len(sliced) < 3:
        raise TooFewSamples(f"need at least 3 sliced cells, got {len(sliced)}")
    points = [
        (grid.axes.resolutions[r_idx], grid.axes.scales[s_idx]) for (r_idx, s_idx), _ in sliced
    ]
    time_fit = fit([(p, result.print_time_s) for p, (_, result) in zip(points, sliced)])
    material_fit = fit([(p, result.material_mm3) for p, (_, result) in zip(points, sliced)])
    return time_fit, material_fit


def interpolate_grid(grid: SliceGrid) -> SliceGrid:
    """Fill every non-sliced cell with predictions from the surface fits.

    Sliced cells are never touched. Cells that already held interpolated
    values are recomputed so they stay consistent with the current fit.
    Each interpolated cell is annotated with the fits' mean LOOCV error.
    """
    time_fit, material_fit = fit_grid(grid)
    accuracy = (time_fit.loocv_error_pct + material_fit.loocv_error_pct) / 2.0
    out = grid.copy()
    for r_idx, layer_height in enumerate(grid.axes.resolutions):
        for s_idx, scale in enumerate(grid.axes.scales):
            existing = out.cells[r_idx][s_idx]
            if existing is not None and existing.status is ResultStatus.SLICED:
                continue
            out.cells[r_idx][s_idx] = SlicingResult(
                print_time_s=predict(time_fit, layer_height, scale),
                material_mm3=predict(material_fit, layer_height, scale),
                status=ResultStatus.INTERPOLATED,
                accuracy_pct=accuracy,
            )
    return out
