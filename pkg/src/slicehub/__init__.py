"""Shared repository of 3D-printing slicing results.

Stores print time and material consumption over a grid of print resolution
profiles x model scales per model, serves them over HTTP, interpolates
missing cells from a fitted polynomial surface, and generates new results
by slicing many configurations in parallel.
"""

from .errors import SliceHubError
from .geometry import MeshMetrics, TriangleMesh, compute_metrics, parse_stl, write_binary_stl
from .grid import (
    ConstraintSet,
    GridAxes,
    SliceGrid,
    build_axes,
    default_bounds,
    filter_cells,
    place_samples,
)
from .interpolation import SurfaceFit, fit, interpolate_grid, predict
from .metadata import MetadataDocument
from .orchestrator import BatchStatus, Orchestrator, SliceJob, merge_results
from .repository import ModelIndexEntry, Repository
from .slicers import (
    ExternalEngineSlicer,
    PrintProfile,
    ResultStatus,
    SliceRequest,
    SlicerBackend,
    SlicingResult,
    SyntheticSlicer,
    synthetic_cost,
)

__version__ = "0.1.0"

__all__ = [
    "BatchStatus",
    "ConstraintSet",
    "ExternalEngineSlicer",
    "GridAxes",
    "MeshMetrics",
    "MetadataDocument",
    "ModelIndexEntry",
    "Orchestrator",
    "PrintProfile",
    "Repository",
    "ResultStatus",
    "SliceGrid",
    "SliceJob",
    "SliceHubError",
    "SliceRequest",
    "SlicerBackend",
    "SlicingResult",
    "SurfaceFit",
    "SyntheticSlicer",
    "TriangleMesh",
    "build_axes",
    "compute_metrics",
    "default_bounds",
    "filter_cells",
    "fit",
    "interpolate_grid",
    "merge_results",
    "parse_stl",
    "place_samples",
    "predict",
    "synthetic_cost",
    "write_binary_stl",
]
