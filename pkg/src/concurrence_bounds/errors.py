"""Exception hierarchy.

Validation problems (bad matrices, bad dimensions, bad parameters) derive from
:class:`ValidationError`; malformed input files raise :class:`ParseError`.
The CLI maps the two families to distinct exit codes.
"""


class ConcurrenceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ConcurrenceError, ValueError):
    """Input violates a mathematical precondition."""


class ParseError(ConcurrenceError, ValueError):
    """A state file could not be parsed."""


class NoConvergence(ConcurrenceError, RuntimeError):
    """An iterative linear-algebra routine failed to converge."""


class NotHermitian(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class BadRank(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class BadTrace(ValidationError):
    pass


class NotIsometry(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class RankTooLarge(ValidationError):
    """Decomposition length exceeds the configured cap on the r**4 tensor."""


class NotSymmetrized(ValidationError):
    pass


class NegativeSpectrum(ConcurrenceError, ArithmeticError):
    """The symmetrized tensor has a clearly negative eigenvalue (upstream bug)."""


class BadZ(ValidationError):
    pass


class BadOptions(ValidationError):
    pass


class WrongDims(ValidationError):
    pass


class UnknownState(ValidationError):
    pass


class BadParams(ValidationError):
    pass


class BadRange(ValidationError):
    pass
