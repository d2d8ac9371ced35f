"""Exception hierarchy shared by all elzaki_qm modules."""


class ElzakiError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ElzakiError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class PoleError(DomainError):
    """Evaluation hit a pole (e.g. Gamma at a non-positive integer)."""


class ConvergenceError(ElzakiError, ArithmeticError):
    """An iterative evaluation did not reach its tolerance."""


class UnsupportedTermError(ElzakiError, ValueError):
    """An expression or operation result falls outside the closed grammar."""


class NotInvertibleError(ElzakiError, ValueError):
    """A transform image cannot be inverted within the expression grammar."""


class NoBoundStateError(ElzakiError, ValueError):
    """The potential admits no bound state for the requested quantum numbers."""


class InsufficientBoundStatesError(ElzakiError, ValueError):
    """The discretised problem has fewer bound states than were requested."""


class ParseError(ElzakiError, ValueError):
    """Malformed expression text. ``position`` is the 0-based column."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ComplexRootError(DomainError):
    """The singularity-removal exponent has no real root."""


class DivergentNormError(DomainError):
    """A wavefunction does not decay, so its norm integral diverges."""


class GridTooCoarseWarning(UserWarning):
    """The two-grid error estimate of a numerical eigenvalue exceeds the tolerance."""
