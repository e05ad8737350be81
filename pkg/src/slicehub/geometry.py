"""STL parsing and mesh metrics.

Handles both binary and ASCII STL. All coordinates are millimeters, the
build axis is Z. Meshes are kept as raw triangle soup: no repair, no
watertightness checks. Open or inconsistently oriented meshes are accepted
and their volume is the absolute value of the signed-tetrahedron sum.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMesh, MalformedStl

_BINARY_HEADER = 80
_TRIANGLE_BYTES = 50  # 12 float32 + uint16 attribute

_ASCII_VERTEX = re.compile(rb"vertex\s+(\S+)\s+(\S+)\s+(\S+)", re.IGNORECASE)
_ASCII_FACET = re.compile(rb"facet\s+normal", re.IGNORECASE)


@dataclass(frozen=True)
class TriangleMesh:
    """Triangle soup; ``vertices`` has shape (n_triangles, 3, 3) in mm."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 3 or v.shape[1:] != (3, 3):
            raise ValueError(f"expected (n, 3, 3) vertex array, got {v.shape}")
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def scaled(self, factor: float) -> "TriangleMesh":
        """Uniformly scaled copy (scale applied about the origin)."""
        return TriangleMesh(self.vertices * float(factor))


@dataclass(frozen=True)
class MeshMetrics:
    """Aggregate quantities the synthetic cost model consumes."""

    volume_mm3: float
    surface_area_mm2: float
    bbox_min: np.ndarray
    bbox_max: np.ndarray
    height_mm: float


def parse_stl(data: bytes) -> TriangleMesh:
    """Parse binary or ASCII STL bytes into a TriangleMesh.

    Format detection: binary when the declared triangle count matches the
    byte length 84 + 50*n, otherwise ASCII when the content starts with the
    token ``solid``. Degenerate (zero-area) triangles are retained; they
    contribute nothing to the metrics.

    Raises MalformedStl on truncated or unparseable input and EmptyMesh
    when the file holds zero triangles.
    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError("parse_stl expects bytes")
    data = bytes(data)

    if len(data) >= _BINARY_HEADER + 4:
        (count,) = struct.unpack_from("<I", data, _BINARY_HEADER)
        if len(data) == _BINARY_HEADER + 4 + _TRIANGLE_BYTES * count:
            return _parse_binary(data, count)

    if data.lstrip()[:5].lower() == b"solid":
        return _parse_ascii(data)

    raise MalformedStl("not a well-formed binary or ASCII STL")


def _parse_binary(data: bytes, count: int) -> TriangleMesh:
    if count == 0:
        raise EmptyMesh("binary STL declares 0 triangles")
    raw = np.frombuffer(
        data,
        dtype=[("normal", "<f4", (3,)), ("vertices", "<f4", (3, 3)), ("attr", "<u2")],
        count=count,
        offset=_BINARY_HEADER + 4,
    )
    vertices = raw["vertices"].astype(np.float64)
    if not np.all(np.isfinite(vertices)):
        raise MalformedStl("binary STL contains non-finite vertex coordinates")
    return TriangleMesh(vertices)


def _parse_ascii(data: bytes) -> TriangleMesh:
    n_facets = len(_ASCII_FACET.findall(data))
    matches = _ASCII_VERTEX.findall(data)
    if n_facets == 0 or len(matches) != 3 * n_facets:
        if n_facets == 0 and not matches:
            raise EmptyMesh("ASCII STL contains no facets")
        raise MalformedStl(
            f"ASCII STL facet/vertex mismatch ({n_facets} facets, {len(matches)} vertices)"
        )
    try:
        flat = np.array(matches, dtype=np.float64)
    except ValueError as exc:
        raise MalformedStl(f"unparseable ASCII vertex: {exc}") from exc
    if not np.all(np.isfinite(flat)):
        raise MalformedStl("ASCII STL contains non-finite vertex coordinates")
    return TriangleMesh(flat.reshape(-1, 3, 3))


def write_binary_stl(mesh: TriangleMesh, header: bytes = b"slicehub") -> bytes:
    """Serialize a mesh as binary STL (float32 vertices, computed normals)."""
    n = len(mesh)
    v = mesh.vertices.astype(np.float32)
    normals = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        normals = np.where(lengths > 0, normals / lengths, 0.0).astype(np.float32)

    out = bytearray(_BINARY_HEADER + 4 + _TRIANGLE_BYTES * n)
    out[: min(len(header), _BINARY_HEADER)] = header[:_BINARY_HEADER]
    struct.pack_into("<I", out, _BINARY_HEADER, n)
    offset = _BINARY_HEADER + 4
    pack = struct.Struct("<12fH").pack_into
    for i in range(n):
        pack(out, offset, *normals[i], *v[i].ravel(), 0)
        offset += _TRIANGLE_BYTES
    return bytes(out)


def compute_metrics(mesh: TriangleMesh) -> MeshMetrics:
    """Volume, surface area, bounding box and build height of a mesh.

    Volume is |sum of signed tetrahedra v0.(v1 x v2)/6| over all triangles
    (divergence theorem); area is the sum of cross-product magnitudes.
    Openness is not detected; callers get the absolute signed sum.
    """
    if len(mesh) == 0:
        raise EmptyMesh("cannot compute metrics of an empty mesh")
    v = mesh.vertices
    v0, v1, v2 = v[:, 0], v[:, 1], v[:, 2]
    signed = np.einsum("ij,ij->i", v0, np.cross(v1, v2)) / 6.0
    cross = np.cross(v1 - v0, v2 - v0)
    areas = np.linalg.norm(cross, axis=1) / 2.0
    flat = v.reshape(-1, 3)
    bbox_min = flat.min(axis=0)
    bbox_max = flat.max(axis=0)
    return MeshMetrics(
        volume_mm3=abs(float(signed.sum())),
        surface_area_mm2=float(areas.sum()),
        bbox_min=bbox_min,
        bbox_max=bbox_max,
        height_mm=float(bbox_max[2] - bbox_min[2]),
    )
