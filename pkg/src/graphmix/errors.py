"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`GraphmixError`, which is itself a ``ValueError`` so callers that
only care about bad input can catch the builtin.
"""


class GraphmixError(ValueError):
    pass


class DomainError(GraphmixError):
    """A parameter lies outside the domain of the requested model."""


class UnsupportedSpaceError(GraphmixError):
    """The operation is not defined on this kind of graph space."""


class InvalidEdgeCountError(GraphmixError):
    pass


class InvalidDispersionError(GraphmixError):
    """A reparameterization has no valid (alpha, beta[, gamma]) solution.

    ``index`` identifies the offending graph when raised from a pooled
    computation over a graph set.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SupportViolationError(GraphmixError):
    pass


class InconsistentCensusError(GraphmixError):
    pass


class ConstraintViolationError(GraphmixError):
    pass


class ZeroStatisticError(GraphmixError):
    pass


class SpaceTooLargeError(GraphmixError):
    pass


class InfeasibleError(GraphmixError):
    pass


class InsufficientChainsError(GraphmixError):
    pass


class EmptyDrawsError(GraphmixError):
    pass


class DataMismatchError(GraphmixError):
    pass


class ParseError(GraphmixError):
    """An input file does not follow its documented schema."""
