"""Exception types raised by the library."""


class NilgeomError(Exception):
    """Base class for all library errors."""


class NotLieBracket(NilgeomError, ValueError):
    """The bracket fails the Jacobi identity beyond tolerance."""


class NotNilpotent(NilgeomError, ValueError):
    """The lower central series stabilizes at a nonzero subspace."""


class NotTwoStep(NilgeomError, ValueError):
    """A 2-step nilpotent bracket was required."""


class RationalizationFailed(NilgeomError, ArithmeticError):
    """Eigenvalues of a derivation could not be fitted by small rationals."""


class FlowDivergence(NilgeomError, ArithmeticError):
    """A flow integration could not be stabilized by step halving."""


class InternalConsistencyError(NilgeomError, AssertionError):
    """An identity that must hold exactly was violated (indicates a bug)."""


class DocumentError(NilgeomError, ValueError):
    """A bracket document could not be parsed; ``where`` names the offending field or line."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
