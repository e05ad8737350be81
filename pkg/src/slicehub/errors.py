"""Exception types shared across the slicehub package."""


class SliceHubError(Exception):
    """Base class for all slicehub errors."""


# -- geometry --------------------------------------------------------------

class MalformedStl(SliceHubError):
    """STL bytes could not be parsed (truncated binary body, bad ASCII facet)."""


class EmptyMesh(SliceHubError):
    """Mesh contains zero triangles."""


# -- slicer backends -------------------------------------------------------

class BackendFailure(SliceHubError):
    """External slicing engine missing, crashed, or exited nonzero."""


class ParseFailure(SliceHubError):
    """Engine output did not contain extractable print time / material."""


class InvalidProfile(SliceHubError):
    """Print profile violates its invariants (e.g. layer height out of range)."""


# -- grid ------------------------------------------------------------------

class TooFewLevels(SliceHubError):
    """Axis needs at least 2 levels."""


class FractionTooSmall(SliceHubError):
    """Sliced fraction yields fewer than the 4 corner cells."""


class InvertedBound(SliceHubError):
    """Constraint lower bound exceeds its upper bound."""


# -- interpolation ---------------------------------------------------------

class TooFewSamples(SliceHubError):
    """Fewer than 3 samples available for a surface fit."""


class DegenerateDesign(SliceHubError):
    """Sample points carry no usable spatial information (all coincident)."""


# -- orchestrator ----------------------------------------------------------

class ParallelismOutOfRange(SliceHubError):
    """Requested parallelism outside [1, 1000]."""


class UnknownBatch(SliceHubError):
    """No batch registered under the given id."""


class IndexOutOfRange(SliceHubError):
    """Cell index outside the grid dimensions."""


# -- repository ------------------------------------------------------------

class UnknownModel(SliceHubError):
    """No model stored under the given id."""


class RejectedInterpolated(SliceHubError):
    """External uploads may only contain sliced results."""
