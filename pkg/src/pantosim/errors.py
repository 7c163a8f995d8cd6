"""Exception types shared across the simulator."""


class PantosimError(Exception):
    """Base class for all simulator errors."""


class GeometryError(PantosimError):
    """Linkage geometry violates a construction invariant or spec equation."""


class JointLimitError(PantosimError):
    """A joint coordinate is outside its allowed range."""

    def __init__(self, joint: str, value: float, lo: float, hi: float):
        self.joint = joint
        self.value = value
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"joint '{joint}' out of range: {value:.6g} not in [{lo:.6g}, {hi:.6g}]"
        )


class UnreachableError(PantosimError):
    """Target lies outside the workspace shell; carries the nearest reachable point."""

    def __init__(self, message: str, nearest):
        self.nearest = nearest
        super().__init__(message)


class SurfaceDomainError(PantosimError):
    """Query point lies outside the domain of the surface (heightfield footprint)."""


class InfeasiblePointError(PantosimError):
    """A point that must be feasible (on or outside the surface) is not."""


class TrajectoryError(PantosimError):
    """Hand-sample trajectory is malformed (empty, non-monotone timestamps)."""


class FormatError(PantosimError):
    """A JSON/CSV artifact does not match its schema."""
