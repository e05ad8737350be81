"""Slicing backends behind a uniform interface.

Two implementations:

* ``SyntheticSlicer`` — deterministic analytic cost model, so grids and
  experiments run without a slicing engine installed.
* ``ExternalEngineSlicer`` — shells out to a slicing engine binary with the
  command line ``<engine> slice -j <settings.json> -l <model.stl> -s k=v ...``
  and scrapes print time and filament from its terminal output.

Output patterns scraped by the external adapter (first match wins):

* print time, seconds:   ``Print time (s): <float>``  or  ``;TIME:<float>``
* filament, volume:      ``Filament (mm^3): <float>`` or ``Filament (mm3): <float>``
* filament, length:      ``Filament (mm): <float>`` — converted to volume via
  the configured filament diameter (2.85 mm or 1.75 mm stock).

Backends are stateless and safe to call from many threads; each external
invocation runs in its own temp directory. Gcode is never kept: the adapter
does not request gcode output and its temp directory is deleted on return.
"""

from __future__ import annotations

import math
import re
import subprocess
import tempfile
import time as _time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import BackendFailure, InvalidProfile, ParseFailure
from .geometry import MeshMetrics, TriangleMesh, compute_metrics, parse_stl, write_binary_stl

# Synthetic cost model constants (common FDM defaults; the point is a
# realistic-shaped nonlinear surface, not realistic absolute values).
INFILL_FRACTION = 0.2
WALL_THICKNESS_MM = 1.2
NOZZLE_DIAMETER_MM = 0.4
PRINT_SPEED_MM_S = 50.0
LAYER_OVERHEAD_S = 2.0

MIN_LAYER_HEIGHT_MM = 0.02
MAX_LAYER_HEIGHT_MM = 1.0


class ResultStatus(str, Enum):
    SLICED = "sliced"
    INTERPOLATED = "interpolated"


@dataclass(frozen=True)
class PrintProfile:
    """A named resolution preset identified by its layer height."""

    profile_id: str
    layer_height_mm: float
    display_name: str = ""
    printer_id: str = ""
    material_id: str = ""

    def __post_init__(self):
        if not (MIN_LAYER_HEIGHT_MM <= self.layer_height_mm <= MAX_LAYER_HEIGHT_MM):
            raise InvalidProfile(
                f"layer height {self.layer_height_mm} mm outside "
                f"[{MIN_LAYER_HEIGHT_MM}, {MAX_LAYER_HEIGHT_MM}]"
            )


def profile_for_layer_height(layer_height_mm: float, printer_id: str = "", material_id: str = "") -> PrintProfile:
    """Synthesized profile for an intermediate layer height on the resolution axis."""
    return PrintProfile(
        profile_id=f"lh-{layer_height_mm:.4f}",
        layer_height_mm=layer_height_mm,
        display_name=f"{layer_height_mm:.2f} mm",
        printer_id=printer_id,
        material_id=material_id,
    )


@dataclass(frozen=True)
class SlicingResult:
    """Print time and filament volume for one profile x scale cell."""

    print_time_s: float
    material_mm3: float
    status: ResultStatus = ResultStatus.SLICED
    accuracy_pct: float | None = None

    def __post_init__(self):
        if self.print_time_s < 0 or self.material_mm3 < 0:
            raise ValueError("print time and material must be nonnegative")
        if (self.accuracy_pct is not None) != (self.status is ResultStatus.INTERPOLATED):
            raise ValueError("accuracy_pct present iff status is interpolated")


@dataclass(frozen=True)
class SliceRequest:
    """One slicing task: a model, a profile, and a uniform scale in (0, 1]."""

    model_ref: TriangleMesh | bytes | str | Path
    profile: PrintProfile
    scale: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.scale <= 1.0):
            raise ValueError(f"scale {self.scale} outside (0, 1]")

    def mesh(self) -> TriangleMesh:
        ref = self.model_ref
        if isinstance(ref, TriangleMesh):
            return ref
        if isinstance(ref, bytes):
            return parse_stl(ref)
        return parse_stl(Path(ref).read_bytes())


def synthetic_cost(metrics: MeshMetrics, layer_height_mm: float, scale: float) -> tuple[float, float]:
    """Closed-form print time (s) and material (mm^3) for the synthetic model.

    material = V*scale^3*INFILL + A*scale^2*WALL
    time     = LAYER_OVERHEAD*ceil(height*scale/layer_height) + material/flow
    with flow = layer_height * NOZZLE * SPEED.
    """
    if layer_height_mm <= 0 or scale <= 0:
        raise ValueError("layer height and scale must be positive")
    v_scaled = metrics.volume_mm3 * scale**3
    a_scaled = metrics.surface_area_mm2 * scale**2
    layers = math.ceil(metrics.height_mm * scale / layer_height_mm)
    material = v_scaled * INFILL_FRACTION + a_scaled * WALL_THICKNESS_MM
    flow = layer_height_mm * NOZZLE_DIAMETER_MM * PRINT_SPEED_MM_S
    print_time = LAYER_OVERHEAD_S * layers + material / flow
    return print_time, material


class SlicerBackend:
    """Interface every slicing backend implements. Stateless; thread-safe."""

    def slice(self, request: SliceRequest) -> SlicingResult:
        raise NotImplementedError


class SyntheticSlicer(SlicerBackend):
    """Deterministic backend driven by the analytic cost model.

    ``delay_s`` injects a fixed sleep per call, for timing harnesses that
    need slicing to take a controlled amount of wall time.
    """

    def __init__(self, delay_s: float = 0.0):
        self.delay_s = delay_s

    def slice(self, request: SliceRequest) -> SlicingResult:
        if self.delay_s > 0:
            _time.sleep(self.delay_s)
        metrics = compute_metrics(request.mesh())
        print_time, material = synthetic_cost(metrics, request.profile.layer_height_mm, request.scale)
        return SlicingResult(print_time_s=print_time, material_mm3=material)


_TIME_PATTERNS = (
    re.compile(r"print time \(s\):\s*([0-9]+(?:\.[0-9]+)?)", re.IGNORECASE),
    re.compile(r";TIME:([0-9]+(?:\.[0-9]+)?)"),
)
_FILAMENT_VOLUME_PATTERNS = (
    re.compile(r"filament \(mm\^?3\):\s*([0-9]+(?:\.[0-9]+)?)", re.IGNORECASE),
)
_FILAMENT_LENGTH_PATTERN = re.compile(r"filament \(mm\):\s*([0-9]+(?:\.[0-9]+)?)", re.IGNORECASE)


class ExternalEngineSlicer(SlicerBackend):
    """Adapter that runs an external engine binary per request.

    Scale is applied by writing a pre-scaled temporary mesh rather than
    passing a scale flag, since scale semantics differ across engines.
    Filament reported as length is converted to volume using
    ``filament_diameter_mm``.
    """

    def __init__(
        self,
        engine_path: str | Path,
        settings_file: str | Path,
        filament_diameter_mm: float = 2.85,
        timeout_s: float = 600.0,
    ):
        self.engine_path = str(engine_path)
        self.settings_file = str(settings_file)
        self.filament_diameter_mm = filament_diameter_mm
        self.timeout_s = timeout_s

    def slice(self, request: SliceRequest) -> SlicingResult:
        mesh = request.mesh()
        if request.scale != 1.0:
            mesh = mesh.scaled(request.scale)
        with tempfile.TemporaryDirectory(prefix="slicehub-engine-") as tmp:
            stl_path = Path(tmp) / "model.stl"
            stl_path.write_bytes(write_binary_stl(mesh))
            cmd = [
                self.engine_path,
                "slice",
                "-j", self.settings_file,
                "-l", str(stl_path),
                "-s", f"layer_height={request.profile.layer_height_mm}",
            ]
            try:
                proc = subprocess.run(cmd, capture_output=True, text=True, timeout=self.timeout_s)
            except FileNotFoundError as exc:
                raise BackendFailure(f"engine not found: {self.engine_path}") from exc
            except subprocess.TimeoutExpired as exc:
                raise BackendFailure(f"engine timed out after {self.timeout_s}s") from exc
        if proc.returncode != 0:
            raise BackendFailure(
                f"engine exited {proc.returncode}: {proc.stderr.strip()[:500]}"
            )
        output = proc.stdout + "\n" + proc.stderr
        return SlicingResult(
            print_time_s=self._extract_time(output),
            material_mm3=self._extract_material(output),
        )

    def _extract_time(self, output: str) -> float:
        for pattern in _TIME_PATTERNS:
            m = pattern.search(output)
            if m:
                return float(m.group(1))
        raise ParseFailure("no print time found in engine output")

    def _extract_material(self, output: str) -> float:
        for pattern in _FILAMENT_VOLUME_PATTERNS:
            m = pattern.search(output)
            if m:
                return float(m.group(1))
        m = _FILAMENT_LENGTH_PATTERN.search(output)
        if m:
            area = math.pi * (self.filament_diameter_mm / 2.0) ** 2
            return float(m.group(1)) * area
        raise ParseFailure("no filament amount found in engine output")
