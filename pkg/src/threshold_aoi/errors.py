"""Exception hierarchy.

Input problems derive from ``ValueError`` (CLI exit code 2). Internal
consistency failures derive from ``ConsistencyError`` (CLI exit code 3):
they cannot occur for validated inputs and indicate a numerical or
implementation defect.
"""


class OutOfRange(ValueError):
    """Walk parameters outside the admissible region."""


class DomainError(ValueError):
    """Argument outside the domain of a series/bound helper."""


class EmptyReport(ValueError):
    """A simulation report with no completed cycles."""


class ConsistencyError(RuntimeError):
    """Base class for violated internal guarantees."""


class ClaimViolation(ConsistencyError):
    """A spectral rate fell outside (-1, 1)."""


class SingularSystem(ConsistencyError):
    """The hitting-time linear system could not be solved."""


class SolveFailure(ConsistencyError):
    """The stationary-distribution solve failed or returned garbage."""


class TruncationLimit(RuntimeError):
    """The truncation search hit its ceiling before reaching the tolerance.

    ``best`` carries the tightest interval that was achieved.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
