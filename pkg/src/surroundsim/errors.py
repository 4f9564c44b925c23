"""Exception types shared across the package."""


class SurroundsimError(Exception):
    """Base class for every error raised by this library."""


class DimensionError(SurroundsimError, ValueError):
    """Matrix/vector shapes do not conform."""


class SingularMatrixError(SurroundsimError, ValueError):
    """A linear solve hit an (effectively) zero pivot."""


class DegenerateKernelError(SurroundsimError, ValueError):
    """Null-space extraction found a kernel that is not one-dimensional,
    not normalizable, or not sign-definite where it has to be."""


class InvalidBodyError(SurroundsimError, ValueError):
    """Convex body construction rejected its input."""


class PreconditionError(SurroundsimError, ValueError):
    """An operation was called outside its stated domain."""


class GraphError(SurroundsimError, ValueError):
    """Configuration-graph construction or arc lookup failed."""


class ScheduleError(SurroundsimError, ValueError):
    """Switching-schedule construction or query failed."""


class MalformedCycleError(SurroundsimError, ValueError):
    """A node/arc sequence does not chain into a cycle of the graph."""


class ConsistencyError(SurroundsimError, ValueError):
    """Operation requires a weakly consistent configuration graph."""


class ConnectivityError(SurroundsimError, ValueError):
    """Operation requires a connected (or strongly connected) graph."""


class ScaleLimitError(SurroundsimError, ValueError):
    """Input exceeds the desk-scale caps this library commits to."""


class DivergenceError(SurroundsimError, RuntimeError):
    """Integration produced a non-finite state."""


class ScenarioError(SurroundsimError, ValueError):
    """Scenario file failed to parse or violated an invariant."""
