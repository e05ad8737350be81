import struct

import numpy as np
import pytest

from slicehub.errors import EmptyMesh, MalformedStl
from slicehub.geometry import TriangleMesh, compute_metrics, parse_stl, write_binary_stl

from conftest import binary_stl_bytes, cube_triangles

ASCII_TRIANGLE = b"""solid single
  facet normal 0 0 1
    outer loop
      vertex 0.0 0.0 0.0
      vertex 10.0 0.0 0.0
      vertex 0.0 10.0 0.0
    endloop
  endfacet
endsolid single
"""


def icosphere_mesh(radius=10.0, subdivisions=2):
    """Subdivided icosahedron projected onto a sphere."""
    phi = (1 + np.sqrt(5)) / 2
    verts = np.array(
        [
            (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
            (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
            (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
        ],
        dtype=float,
    )
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    tris = [np.array([verts[a], verts[b], verts[c]]) for a, b, c in faces]
    for _ in range(subdivisions):
        refined = []
        for tri in tris:
            a, b, c = tri
            ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
            refined += [
                np.array([a, ab, ca]), np.array([ab, b, bc]),
                np.array([ca, bc, c]), np.array([ab, bc, ca]),
            ]
        tris = refined
    tris = np.array(tris)
    norms = np.linalg.norm(tris, axis=2, keepdims=True)
    return TriangleMesh(tris / norms * radius)


class TestParsing:
    def test_binary_cube_parses_12_triangles(self, cube20_stl):
        mesh = parse_stl(cube20_stl)
        assert len(mesh) == 12

    def test_ascii_single_triangle(self):
        mesh = parse_stl(ASCII_TRIANGLE)
        assert len(mesh) == 1
        assert mesh.vertices[0][1][0] == 10.0

    def test_truncated_binary_is_malformed(self):
        data = binary_stl_bytes(cube_triangles(10.0))
        declared_100 = data[:80] + struct.pack("<I", 100) + data[84:]
        with pytest.raises(MalformedStl):
            parse_stl(declared_100)

    def test_garbage_is_malformed(self):
        with pytest.raises(MalformedStl):
            parse_stl(b"\x00" * 200)

    def test_bad_ascii_vertex_is_malformed(self):
        with pytest.raises(MalformedStl):
            parse_stl(ASCII_TRIANGLE.replace(b"10.0 0.0 0.0", b"ten zero zero"))

    def test_ascii_missing_vertex_is_malformed(self):
        broken = ASCII_TRIANGLE.replace(b"vertex 0.0 10.0 0.0\n", b"")
        with pytest.raises(MalformedStl):
            parse_stl(broken)

    def test_zero_triangle_binary_is_empty(self):
        with pytest.raises(EmptyMesh):
            parse_stl(binary_stl_bytes([]))

    def test_empty_ascii_solid(self):
        with pytest.raises(EmptyMesh):
            parse_stl(b"solid nothing\nendsolid nothing\n")

    def test_roundtrip_binary_identical_triangles(self, cube20_mesh):
        again = parse_stl(write_binary_stl(cube20_mesh))
        assert np.array_equal(again.vertices, cube20_mesh.vertices)


class TestMetrics:
    def test_cube_analytic_values(self, cube20_mesh):
        m = compute_metrics(cube20_mesh)
        assert m.volume_mm3 == pytest.approx(8000.0, abs=1e-6)
        assert m.surface_area_mm2 == pytest.approx(2400.0, abs=1e-6)
        assert m.height_mm == pytest.approx(20.0, abs=1e-9)
        assert np.allclose(m.bbox_min, [0, 0, 0])
        assert np.allclose(m.bbox_max, [20, 20, 20])

    def test_single_open_triangle_no_error(self):
        mesh = parse_stl(ASCII_TRIANGLE)
        m = compute_metrics(mesh)
        # |signed tetra| of that one triangle; here the plane passes
        # through the origin so the tetra volume is zero
        assert m.volume_mm3 == pytest.approx(0.0, abs=1e-12)
        assert m.surface_area_mm2 == pytest.approx(50.0, abs=1e-9)

    def test_icosphere_matches_bruteforce_tetra_sum(self):
        mesh = icosphere_mesh(radius=10.0)
        m = compute_metrics(mesh)
        # independent oracle: plain-python signed tetra summation
        signed = 0.0
        for tri in mesh.vertices:
            (x0, y0, z0), (x1, y1, z1), (x2, y2, z2) = tri
            cx = y1 * z2 - z1 * y2
            cy = z1 * x2 - x1 * z2
            cz = x1 * y2 - y1 * x2
            signed += (x0 * cx + y0 * cy + z0 * cz) / 6.0
        assert m.volume_mm3 == pytest.approx(abs(signed), rel=1e-12)
        # sanity: within 5% of the analytic sphere at this refinement
        assert m.volume_mm3 == pytest.approx(4 / 3 * np.pi * 1000, rel=0.05)

    def test_translation_invariance(self, cube20_mesh, rng):
        offset = rng.uniform(-500, 500, size=3)
        moved = TriangleMesh(cube20_mesh.vertices + offset)
        m0, m1 = compute_metrics(cube20_mesh), compute_metrics(moved)
        assert m1.volume_mm3 == pytest.approx(m0.volume_mm3, rel=1e-9)
        assert m1.surface_area_mm2 == pytest.approx(m0.surface_area_mm2, rel=1e-9)

    def test_scaling_law(self, cube20_mesh):
        for s in (0.5, 2.0, 3.7):
            m0 = compute_metrics(cube20_mesh)
            m1 = compute_metrics(cube20_mesh.scaled(s))
            assert m1.volume_mm3 == pytest.approx(m0.volume_mm3 * s**3, rel=1e-9)
            assert m1.surface_area_mm2 == pytest.approx(m0.surface_area_mm2 * s**2, rel=1e-9)

    def test_degenerate_triangles_ignored_by_metrics(self, cube20_mesh):
        degenerate = np.array([[[1, 1, 1], [2, 2, 2], [3, 3, 3]]], dtype=float)
        padded = TriangleMesh(np.concatenate([cube20_mesh.vertices, degenerate]))
        m = compute_metrics(padded)
        assert m.volume_mm3 == pytest.approx(8000.0, abs=1e-6)
        assert m.surface_area_mm2 == pytest.approx(2400.0, abs=1e-6)

    def test_empty_mesh_errors(self):
        with pytest.raises(EmptyMesh):
            compute_metrics(TriangleMesh(np.empty((0, 3, 3))))
