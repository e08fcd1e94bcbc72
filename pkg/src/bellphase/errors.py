"""Exception types raised by the library.

Every error derives from :class:`BellPhaseError` so callers (and the CLI) can
catch the whole family at once.
"""


class BellPhaseError(Exception):
    pass


class InvalidArgumentError(BellPhaseError, ValueError):
    """Non-finite number, unknown enum member, malformed configuration."""


class PreconditionError(BellPhaseError, ValueError):
    """Input violates an operation's precondition (non-unitary matrix, bad support...)."""


class DomainError(BellPhaseError, ValueError):
    """A setting lies outside the domain where a scheme's formulas are defined."""


class DegenerateAnalyzerError(BellPhaseError, ValueError):
    """Analyzer with alpha at 0 or pi/2: its phase parameters carry no information."""


class ConvergenceError(BellPhaseError, RuntimeError):
    pass


class IllConditionedError(BellPhaseError, ValueError):
    pass


class LowVisibilityError(BellPhaseError, ValueError):
    """Fringe contrast below the validity threshold.

    The offending estimate is attached as ``estimate`` so callers can still report it.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class RangeError(BellPhaseError, OverflowError):
    pass
