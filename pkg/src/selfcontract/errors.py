"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid geometric input (bad coordinates, degenerate configuration)."""


class SpaceMismatchError(GeometryError):
    """Points or directions from different spaces were combined."""


class UnsupportedSpaceError(GeometryError):
    """The requested operation is not available on this space."""


class SolverError(RuntimeError):
    """The minimization backend failed to produce a usable answer."""
