"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Input graph violates the format contract (ids, rotation, conductances)."""


class SolverError(RuntimeError):
    """Linear solve failed to reach the required residual."""


class TransienceNotEstablished(RuntimeError):
    """Exhaustion solves did not converge within the depth budget.

    Carries the sequence of sup-changes between successive depths so the
    caller can inspect how far from Cauchy the run was.
    """

    def __init__(self, message, gaps=None):
        super().__init__(message)
        self.gaps = list(gaps) if gaps is not None else []


class TilingError(RuntimeError):
    """Tiling construction failed (inconsistent flow, bad absorption set)."""


class LevelCollisionError(ValueError):
    """A requested cut level collides with an existing vertex height."""


class MeridianEndpointError(ValueError):
    """A meridian coordinate hits a rectangle or interval endpoint; perturb it."""


class ArcEndpointError(ValueError):
    """An arc endpoint sits too close to a vertex-interval endpoint to
    classify containment reliably; perturb the arc.  Exactly aligned
    endpoints are fine, near-misses are not."""
