import struct

import numpy as np
import pytest


def cube_triangles(side: float, origin=(0.0, 0.0, 0.0)):
    """Canonical 12-triangle cube tessellation with outward winding."""
    ox, oy, oz = origin
    s = side
    p = [
        (ox, oy, oz), (ox + s, oy, oz), (ox + s, oy + s, oz), (ox, oy + s, oz),
        (ox, oy, oz + s), (ox + s, oy, oz + s), (ox + s, oy + s, oz + s), (ox, oy + s, oz + s),
    ]
    faces = [
        (0, 2, 1), (0, 3, 2),
        (4, 5, 6), (4, 6, 7),
        (0, 1, 5), (0, 5, 4),
        (1, 2, 6), (1, 6, 5),
        (2, 3, 7), (2, 7, 6),
        (3, 0, 4), (3, 4, 7),
    ]
    return [(p[a], p[b], p[c]) for a, b, c in faces]


def binary_stl_bytes(triangles, header=b"test") -> bytes:
    """Assemble binary STL bytes directly with struct (independent of the
    package's own writer)."""
    blob = bytearray(header.ljust(80, b"\0")[:80])
    blob += struct.pack("<I", len(triangles))
    for tri in triangles:
        blob += struct.pack("<3f", 0.0, 0.0, 0.0)  # normal left zero
        for vertex in tri:
            blob += struct.pack("<3f", *vertex)
        blob += struct.pack("<H", 0)
    return bytes(blob)


@pytest.fixture
def cube20_stl() -> bytes:
    return binary_stl_bytes(cube_triangles(20.0))


@pytest.fixture
def cube20_mesh(cube20_stl):
    from slicehub.geometry import parse_stl

    return parse_stl(cube20_stl)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in str(item.fspath):
        status = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
        reporter = item.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.write_line(f"ACCEPTANCE {status}: {item.name}")
