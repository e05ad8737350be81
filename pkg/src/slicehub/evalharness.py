"""Desk-scale reproduction of the grid-size and interpolation experiments.

The original corpora of popular repository models are not redistributable,
so experiments run over a procedurally generated set of parametric meshes
(boxes, cylinders, tori, random convex hulls) spanning more than two
orders of magnitude in volume. Absolute error numbers therefore differ
from any published ones; the assertions downstream are on trend shape and
ordering only. Everything is deterministic under a fixed seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull

from .geometry import MeshMetrics, TriangleMesh, compute_metrics
from .grid import GridAxes, build_axes, sublattice_indices
from .interpolation import fit, predict
from .slicers import synthetic_cost

CSV_COLUMNS = ["condition", "metric", "mean_error_pct", "n_models", "n_points", "seed"]


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated error for one experimental condition."""

    condition: str
    mean_relative_error_time_pct: float
    mean_relative_error_material_pct: float
    n_models: int
    n_constraints_or_cells: int
    seed: int


# -- corpus ------------------------------------------------------------


def box_mesh(lx: float, ly: float, lz: float) -> TriangleMesh:
    """Axis-aligned box with consistent outward winding (12 triangles)."""
    x, y, z = lx, ly, lz
    p = np.array(
        [[0, 0, 0], [x, 0, 0], [x, y, 0], [0, y, 0], [0, 0, z], [x, 0, z], [x, y, z], [0, y, z]],
        dtype=np.float64,
    )
    faces = [
        (0, 2, 1), (0, 3, 2),  # bottom (normal -z)
        (4, 5, 6), (4, 6, 7),  # top (+z)
        (0, 1, 5), (0, 5, 4),  # front (-y)
        (1, 2, 6), (1, 6, 5),  # right (+x)
        (2, 3, 7), (2, 7, 6),  # back (+y)
        (3, 0, 4), (3, 4, 7),  # left (-x)
    ]
    return TriangleMesh(np.array([[p[a], p[b], p[c]] for a, b, c in faces]))


def cylinder_mesh(radius: float, height: float, n_segments: int = 32) -> TriangleMesh:
    angles = np.linspace(0.0, 2.0 * math.pi, n_segments, endpoint=False)
    rim = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    bottom_center = np.array([0.0, 0.0, 0.0])
    top_center = np.array([0.0, 0.0, height])
    triangles = []
    for i in range(n_segments):
        j = (i + 1) % n_segments
        b_i = np.array([rim[i][0], rim[i][1], 0.0])
        b_j = np.array([rim[j][0], rim[j][1], 0.0])
        t_i = np.array([rim[i][0], rim[i][1], height])
        t_j = np.array([rim[j][0], rim[j][1], height])
        triangles.append([bottom_center, b_j, b_i])  # bottom cap faces -z
        triangles.append([top_center, t_i, t_j])  # top cap faces +z
        triangles.append([b_i, b_j, t_j])  # side
        triangles.append([b_i, t_j, t_i])
    return TriangleMesh(np.array(triangles))


def torus_mesh(major_radius: float, minor_radius: float, n_major: int = 24, n_minor: int = 12) -> TriangleMesh:
    us = np.linspace(0.0, 2.0 * math.pi, n_major, endpoint=False)
    vs = np.linspace(0.0, 2.0 * math.pi, n_minor, endpoint=False)

    def point(u, v):
        w = major_radius + minor_radius * math.cos(v)
        return np.array([w * math.cos(u), w * math.sin(u), minor_radius * math.sin(v)])

    triangles = []
    for i in range(n_major):
        for j in range(n_minor):
            u0, u1 = us[i], us[(i + 1) % n_major]
            v0, v1 = vs[j], vs[(j + 1) % n_minor]
            p00, p10 = point(u0, v0), point(u1, v0)
            p11, p01 = point(u1, v1), point(u0, v1)
            triangles.append([p00, p10, p11])
            triangles.append([p00, p11, p01])
    return TriangleMesh(np.array(triangles))


def convex_hull_mesh(points: np.ndarray) -> TriangleMesh:
    """Hull of a point cloud, faces oriented outward from the centroid."""
    hull = ConvexHull(points)
    centroid = points[hull.vertices].mean(axis=0)
    triangles = []
    for simplex in hull.simplices:
        a, b, c = points[simplex]
        normal = np.cross(b - a, c - a)
        if np.dot(normal, (a + b + c) / 3.0 - centroid) < 0:
            b, c = c, b
        triangles.append([a, b, c])
    return TriangleMesh(np.array(triangles))


def generate_corpus(n_models: int, seed: int) -> list[TriangleMesh]:
    """Deterministic parametric meshes with volumes spanning >= 2 orders
    of magnitude (the first two models pin the small and large ends)."""
    if n_models < 1:
        raise ValueError("need at least one model")
    meshes = []
    for index in range(n_models):
        rng = np.random.default_rng([seed, index])
        if index == 0:
            meshes.append(box_mesh(5.0, 6.0, 7.0))
            continue
        if index == 1:
            meshes.append(box_mesh(38.0, 40.0, 42.0))
            continue
        size = float(np.exp(rng.uniform(np.log(8.0), np.log(36.0))))
        kind = index % 4
        if kind == 0:
            dims = size * rng.uniform(0.6, 1.2, size=3)
            meshes.append(box_mesh(*dims))
        elif kind == 1:
            meshes.append(cylinder_mesh(radius=size * 0.35, height=size * rng.uniform(0.8, 1.4)))
        elif kind == 2:
            meshes.append(torus_mesh(major_radius=size * 0.33, minor_radius=size * 0.12))
        else:
            points = rng.normal(scale=size * 0.4, size=(40, 3))
            meshes.append(convex_hull_mesh(points))
    return meshes


# -- experiments --------------------------------------------------------


def grid_values(metrics: MeshMetrics, axes: GridAxes) -> tuple[np.ndarray, np.ndarray]:
    """(times, materials) arrays of shape (n_resolutions, n_scales)."""
    times = np.empty((axes.n_resolutions, axes.n_scales))
    materials = np.empty_like(times)
    for i, layer_height in enumerate(axes.resolutions):
        for j, scale in enumerate(axes.scales):
            times[i, j], materials[i, j] = synthetic_cost(metrics, layer_height, scale)
    return times, materials


def _closest_match_error(values: np.ndarray, targets: np.ndarray) -> float:
    flat = values.ravel()
    errors = [np.min(np.abs(flat - t)) / t for t in targets]
    return float(np.mean(errors))


def constraint_error_experiment(
    corpus: list[TriangleMesh],
    grid_sizes: list[int],
    n_constraints: int = 20,
    seed: int = 42,
) -> list[ExperimentReport]:
    """Mean relative error to the closest matching cell when a random
    print-time or material target must be met, per grid size.

    Targets are drawn uniformly from each model's min/max bounds; the
    corner cells pin those bounds, so targets are paired across sizes.
    """
    all_metrics = [compute_metrics(mesh) for mesh in corpus]
    reports = []
    for size in grid_sizes:
        axes = build_axes(size, size)
        time_errors, material_errors = [], []
        for model_idx, metrics in enumerate(all_metrics):
            times, materials = grid_values(metrics, axes)
            rng_t = np.random.default_rng([seed, model_idx, 0])
            rng_m = np.random.default_rng([seed, model_idx, 1])
            time_targets = rng_t.uniform(times.min(), times.max(), size=n_constraints)
            material_targets = rng_m.uniform(materials.min(), materials.max(), size=n_constraints)
            time_errors.append(_closest_match_error(times, time_targets))
            material_errors.append(_closest_match_error(materials, material_targets))
        reports.append(
            ExperimentReport(
                condition=f"{size}x{size}",
                mean_relative_error_time_pct=float(np.mean(time_errors)) * 100.0,
                mean_relative_error_material_pct=float(np.mean(material_errors)) * 100.0,
                n_models=len(corpus),
                n_constraints_or_cells=n_constraints,
                seed=seed,
            )
        )
    return reports


def interpolation_error_experiment(
    corpus: list[TriangleMesh],
    sliced_sublattices: list[int] | None = None,
    seed: int = 42,
    grid_size: int = 16,
) -> list[ExperimentReport]:
    """Interpolation error against fully sliced ground truth for k x k
    sliced sub-lattices of the default grid. Per-model mean errors are
    averaged across models; k = grid size means nothing is interpolated
    and the error is zero by convention."""
    if sliced_sublattices is None:
        sliced_sublattices = [2, 3, 5, 9, 16]
    if any(k > grid_size for k in sliced_sublattices):
        raise ValueError(f"sub-lattice size exceeds grid size {grid_size}")
    axes = build_axes(grid_size, grid_size)
    all_values = [grid_values(compute_metrics(mesh), axes) for mesh in corpus]

    reports = []
    for k in sliced_sublattices:
        idx = sublattice_indices(grid_size, k)
        sampled = {(i, j) for i in idx for j in idx}
        time_errors, material_errors = [], []
        n_unsliced = grid_size * grid_size - len(sampled)
        for times, materials in all_values:
            if n_unsliced == 0:
                time_errors.append(0.0)
                material_errors.append(0.0)
                continue
            time_errors.append(_interpolation_error(axes, times, sampled))
            material_errors.append(_interpolation_error(axes, materials, sampled))
        reports.append(
            ExperimentReport(
                condition=f"{k}x{k}",
                mean_relative_error_time_pct=float(np.mean(time_errors)) * 100.0,
                mean_relative_error_material_pct=float(np.mean(material_errors)) * 100.0,
                n_models=len(corpus),
                n_constraints_or_cells=n_unsliced,
                seed=seed,
            )
        )
    return reports


def _interpolation_error(axes: GridAxes, values: np.ndarray, sampled: set[tuple[int, int]]) -> float:
    samples = [
        ((axes.resolutions[i], axes.scales[j]), float(values[i, j])) for (i, j) in sorted(sampled)
    ]
    surface = fit(samples)
    errors = []
    for i in range(axes.n_resolutions):
        for j in range(axes.n_scales):
            if (i, j) in sampled:
                continue
            true = float(values[i, j])
            if true == 0:
                continue
            predicted = predict(surface, axes.resolutions[i], axes.scales[j])
            errors.append(abs(predicted - true) / true)
    return float(np.mean(errors))


def write_reports_csv(reports: list[ExperimentReport], path: str | Path) -> None:
    """Two rows per report (time and material), stable column order."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            for metric, value in (
                ("time", report.mean_relative_error_time_pct),
                ("material", report.mean_relative_error_material_pct),
            ):
                writer.writerow(
                    [
                        report.condition,
                        metric,
                        f"{value:.4f}",
                        report.n_models,
                        report.n_constraints_or_cells,
                        report.seed,
                    ]
                )
