"""Exception hierarchy.

Every error raised on purpose by the library derives from GraphletError, so the
CLI can map whole families onto exit codes without catching unrelated bugs.
"""


class GraphletError(Exception):
    """Base class for all library errors."""


class InputError(GraphletError, ValueError):
    """Malformed or invalid input (CLI exit code 2)."""


class NumericalFailure(GraphletError, ArithmeticError):
    """A numerical routine failed to converge (CLI exit code 3)."""


class PreconditionRefused(GraphletError):
    """A valid input that the requested operation refuses (CLI exit code 4)."""


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IsolatedVertex(InputError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"IsolatedVertex({vertex}): vertex has zero degree")


class NegativeWeight(InputError):
    pass


class ConflictingEdge(InputError):
    pass


class VertexCountMismatch(InputError):
    pass


class InvalidPartition(InputError):
    pass


class InvalidSplit(InputError):
    pass


class SizeTooSmall(InputError):
    pass


class NeedTwoSizes(InputError):
    pass


class ProbabilityOverflow(InputError):
    pass


class RefinementTooLarge(PreconditionRefused):
    pass


class ExactModeTooLarge(PreconditionRefused):
    pass


class NotConnected(PreconditionRefused):
    pass


class SpectralGapTooSmall(PreconditionRefused):
    pass


class DegeneratePart(PreconditionRefused):
    pass


class BalanceNotBracketed(NumericalFailure):
    pass


class IsolationRetryExhausted(NumericalFailure):
    pass
