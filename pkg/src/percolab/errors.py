"""Exception types shared across the package."""


class PercolabError(Exception):
    """Base class for all package errors."""


class MeshTooCoarse(PercolabError):
    """Hexagon mesh cannot represent the requested domain or marks."""


class SameVertex(PercolabError):
    """Two boundary split points coincide."""


class DegenerateMarks(PercolabError):
    """Marked boundary points coincide or violate ordering."""


class StepBudgetExceeded(PercolabError):
    """Exploration walk exceeded its step budget (logic error)."""


class IncompleteColoring(PercolabError):
    """A full site coloring was required but some sites are missing."""


class TargetUnreachable(PercolabError):
    """Exploration reached its endpoint before touching the target arc."""


class MapNotConverged(PercolabError):
    """Numerical conformal map failed its accuracy budget."""


class ResolutionTooCoarse(PercolabError):
    """Trace resolution too coarse for the requested stopping radius."""


class EmptySet(PercolabError):
    """Set-valued argument was empty."""


class EmptySamples(PercolabError):
    """Sample vector was empty."""


class ConfigInvalid(PercolabError):
    """Experiment configuration failed validation."""
