import numpy as np
import pytest

from slicehub.errors import FractionTooSmall, InvertedBound, TooFewLevels
from slicehub.grid import (
    ConstraintSet,
    GridAxes,
    SliceGrid,
    build_axes,
    default_bounds,
    filter_cells,
    place_samples,
    sublattice_indices,
)
from slicehub.slicers import SlicingResult


def random_grid(rng, n=8, fill=1.0):
    grid = SliceGrid(axes=build_axes(n, n))
    for i in range(n):
        for j in range(n):
            if rng.random() <= fill:
                grid.cells[i][j] = SlicingResult(
                    print_time_s=float(rng.uniform(0, 1000)),
                    material_mm3=float(rng.uniform(0, 500)),
                )
    return grid


class TestBuildAxes:
    def test_two_levels_are_the_endpoints(self):
        axes = build_axes(2, 2)
        assert axes.resolutions == (0.06, 0.2)
        assert axes.scales == (1.0, 0.1)

    def test_three_levels_are_midpoints(self):
        axes = build_axes(3, 3)
        assert axes.resolutions == pytest.approx((0.06, 0.13, 0.2))
        assert axes.scales == pytest.approx((1.0, 0.55, 0.1))

    def test_midpoint_cascade_refines_in_place(self):
        coarse = build_axes(5, 5)
        fine = build_axes(9, 9)
        assert set(np.round(coarse.resolutions, 12)) <= set(np.round(fine.resolutions, 12))
        assert set(np.round(coarse.scales, 12)) <= set(np.round(fine.scales, 12))

    def test_sixteen_scales_uniform(self):
        axes = build_axes(16, 16)
        assert len(axes.scales) == 16
        steps = np.diff(axes.scales)
        assert np.allclose(steps, -0.06)
        assert axes.scales[0] == 1.0 and axes.scales[-1] == pytest.approx(0.1)

    def test_monotone_no_duplicates(self):
        for n in (2, 3, 5, 9, 16, 17, 31, 33):
            axes = build_axes(n, n)
            assert all(b > a for a, b in zip(axes.resolutions, axes.resolutions[1:]))
            assert all(b < a for a, b in zip(axes.scales, axes.scales[1:]))

    def test_too_few_levels(self):
        with pytest.raises(TooFewLevels):
            build_axes(1, 16)
        with pytest.raises(TooFewLevels):
            build_axes(16, 1)

    def test_axes_validate_monotonicity(self):
        with pytest.raises(ValueError):
            GridAxes(resolutions=(0.2, 0.06), scales=(1.0, 0.1))
        with pytest.raises(ValueError):
            GridAxes(resolutions=(0.06, 0.2), scales=(0.1, 1.0))


class TestPlaceSamples:
    def test_ten_percent_of_16x16_is_5x5_with_corners(self):
        axes = build_axes(16, 16)
        cells = place_samples(axes, 0.10)
        assert len(cells) == 25
        rows = {r for r, _ in cells}
        cols = {s for _, s in cells}
        assert len(rows) == 5 and len(cols) == 5
        assert {(0, 0), (0, 15), (15, 0), (15, 15)} <= cells

    def test_full_fraction_is_everything(self):
        axes = build_axes(16, 16)
        assert len(place_samples(axes, 1.0)) == 256

    def test_minimum_lattice_is_the_corners(self):
        axes = build_axes(16, 16)
        cells = place_samples(axes, 0.016)
        assert cells == {(0, 0), (0, 15), (15, 0), (15, 15)}

    def test_fraction_below_four_cells(self):
        axes = build_axes(16, 16)
        with pytest.raises(FractionTooSmall):
            place_samples(axes, 0.01)

    def test_corners_always_included(self, rng):
        axes = build_axes(16, 16)
        for fraction in rng.uniform(0.016, 1.0, size=50):
            cells = place_samples(axes, float(fraction))
            assert {(0, 0), (0, 15), (15, 0), (15, 15)} <= cells

    def test_count_never_exceeds_request(self, rng):
        axes = build_axes(16, 16)
        for fraction in rng.uniform(0.016, 1.0, size=50):
            cells = place_samples(axes, float(fraction))
            assert len(cells) <= fraction * 256

    def test_symmetric_when_positions_exact(self):
        # (n-1) divisible by (k-1): placement mirrors onto itself
        for n, k in ((17, 5), (16, 4), (16, 6), (9, 3), (16, 16)):
            idx = sublattice_indices(n, k)
            assert sorted(n - 1 - i for i in idx) == idx


class TestFilter:
    def test_no_bounds_passes_all(self, rng):
        grid = random_grid(rng)
        assert filter_cells(grid, ConstraintSet()) == {idx for idx, _ in grid.populated()}

    def test_single_upper_bound(self, rng):
        grid = random_grid(rng)
        cells = filter_cells(grid, ConstraintSet(time_hi_s=500))
        expected = {idx for idx, r in grid.populated() if r.print_time_s <= 500}
        assert cells == expected

    def test_conjunction_is_intersection_of_single_filters(self, rng):
        grid = random_grid(rng)
        both = filter_cells(grid, ConstraintSet(time_lo_s=200, time_hi_s=800, material_lo=50, material_hi=300))
        time_only = filter_cells(grid, ConstraintSet(time_lo_s=200, time_hi_s=800))
        material_only = filter_cells(grid, ConstraintSet(material_lo=50, material_hi=300))
        assert both == time_only & material_only

    def test_bounds_inclusive(self, rng):
        grid = random_grid(rng)
        (idx, result) = next(grid.populated())
        cells = filter_cells(grid, ConstraintSet(time_lo_s=result.print_time_s, time_hi_s=result.print_time_s))
        assert idx in cells

    def test_matches_bruteforce_scan(self, rng):
        # randomized oracle; the acceptance suite runs the full 1000
        for _ in range(100):
            grid = random_grid(rng, n=4, fill=0.9)
            bounds = sorted(rng.uniform(0, 1000, size=2))
            mat = sorted(rng.uniform(0, 500, size=2))
            cs = ConstraintSet(time_lo_s=bounds[0], time_hi_s=bounds[1], material_lo=mat[0], material_hi=mat[1])
            expected = set()
            for i in range(4):
                for j in range(4):
                    r = grid.cells[i][j]
                    if r is None:
                        continue
                    if bounds[0] <= r.print_time_s <= bounds[1] and mat[0] <= r.material_mm3 <= mat[1]:
                        expected.add((i, j))
            assert filter_cells(grid, cs) == expected

    def test_adding_bounds_never_grows_result(self, rng):
        grid = random_grid(rng)
        loose = filter_cells(grid, ConstraintSet(time_hi_s=800))
        tight = filter_cells(grid, ConstraintSet(time_hi_s=800, material_hi=250))
        assert tight <= loose

    def test_inverted_bound(self):
        with pytest.raises(InvertedBound):
            ConstraintSet(time_lo_s=10, time_hi_s=5)
        with pytest.raises(InvertedBound):
            ConstraintSet(material_lo=10, material_hi=5)

    def test_negative_bound_rejected(self):
        with pytest.raises(ValueError):
            ConstraintSet(time_lo_s=-1)


class TestDefaultBounds:
    def test_single_cell(self):
        grid = SliceGrid(axes=build_axes(2, 2))
        grid.cells[0][0] = SlicingResult(10.0, 5.0)
        bounds = default_bounds(grid)
        assert (bounds.time_lo_s, bounds.time_hi_s) == (10.0, 10.0)
        assert (bounds.material_lo, bounds.material_hi) == (5.0, 5.0)

    def test_bounds_attained_by_cells(self, rng):
        grid = random_grid(rng)
        bounds = default_bounds(grid)
        times = [r.print_time_s for _, r in grid.populated()]
        materials = [r.material_mm3 for _, r in grid.populated()]
        assert bounds.time_lo_s in times and bounds.time_hi_s in times
        assert bounds.material_lo in materials and bounds.material_hi in materials

    def test_synthetic_cube_extremes_at_corners(self, cube20_mesh):
        from slicehub.evalharness import grid_values
        from slicehub.geometry import compute_metrics

        axes = build_axes(16, 16)
        times, materials = grid_values(compute_metrics(cube20_mesh), axes)
        grid = SliceGrid(axes=axes)
        for i in range(16):
            for j in range(16):
                grid.cells[i][j] = SlicingResult(float(times[i, j]), float(materials[i, j]))
        bounds = default_bounds(grid)
        # min at (0.2 mm, 10%) = cell (15, 15); max at (0.06 mm, 100%) = (0, 0)
        assert bounds.time_lo_s == pytest.approx(times[15, 15])
        assert bounds.time_hi_s == pytest.approx(times[0, 0])

    def test_empty_grid_errors(self):
        with pytest.raises(ValueError):
            default_bounds(SliceGrid(axes=build_axes(4, 4)))
