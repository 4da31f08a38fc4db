"""Exception hierarchy.

Input errors subclass ``ValueError``; violated mathematical preconditions
(a non-Markovian network handed to a Markovian-only routine, an infeasible
delta) subclass :class:`PreconditionError`. The CLI maps the two families to
different exit codes.
"""


class NetworkError(ValueError):
    """Base class for invalid input."""


class PreconditionError(NetworkError):
    """Input is well-formed but violates a structural requirement."""


class InvalidUnit(NetworkError):
    pass


class EmptyBoundary(NetworkError):
    pass


class Disconnected(NetworkError):
    pass


class SingularSystem(ArithmeticError):
    pass


class NonPositiveScale(NetworkError):
    pass


class NotMarkovian(PreconditionError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ParallelUnitsPresent(PreconditionError):
    pass


class AsymmetricEdge(NetworkError):
    pass


class NotIrreducible(NetworkError):
    pass


class NotStochastic(NetworkError):
    pass


class SetsOverlap(NetworkError):
    pass


class EmptySet(NetworkError):
    pass


class SourceInTarget(NetworkError):
    pass


class SameVertex(NetworkError):
    pass


class MidVertexNotFree(NetworkError):
    pass


class EndpointMismatch(NetworkError):
    pass


class CenterNotIsolated(NetworkError):
    pass


class InfeasibleDelta(PreconditionError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class MissingTerminal(NetworkError):
    pass


class TruncationExceeded(RuntimeError):
    def __init__(self, message, n_truncated):
        super().__init__(message)
        self.n_truncated = n_truncated


class ConsistencyError(ArithmeticError):
    """Two independent computation routes disagreed beyond tolerance."""
