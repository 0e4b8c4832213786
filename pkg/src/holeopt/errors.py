"""Exception types shared across the toolkit."""


class HoleoptError(Exception):
    """Base class for all toolkit errors."""


class GeometryError(HoleoptError):
    """Invalid geometric configuration (ball outside the domain, bad radius, ...)."""


class AmbiguousProjection(GeometryError):
    """Nearest-boundary-point projection is not unique at the query point."""


class MeshFailure(HoleoptError):
    """Mesh generation did not reach the required quality."""


class NoConvergence(HoleoptError):
    """Iterative solver hit its iteration cap.

    The best iterate found so far is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class OutsideMesh(HoleoptError):
    """A point evaluation was requested outside the meshed region."""


class SingularBoundaryMass(HoleoptError):
    """The boundary mass system of the flux recovery is singular."""


class FitDiverged(HoleoptError):
    """A nonlinear or degenerate fit failed to produce parameters."""


class InfeasibleStart(HoleoptError):
    """Optimizer started from an infeasible hole position."""


class ConfigError(HoleoptError):
    """A run configuration is malformed or out of documented ranges."""
