"""Exception hierarchy shared by all modules.

Three families matter to callers: validation errors (bad input, CLI exit
code 2), cap errors (refused work, exit code 3), and internal-consistency
errors (a mathematical identity failed to hold, exit code 4 -- these always
indicate a bug, never bad input).
"""


class Error(Exception):
    """Base class for all library errors."""


class ValidationError(Error):
    """Bad input: rejected before any real work happens."""


class NotPrime(ValidationError):
    pass


class Reducible(ValidationError):
    """A supplied modulus polynomial is not irreducible."""


class NoIrreducibleFound(ValidationError):
    """Exhausted the search space; impossible for valid (p, a)."""


class DivisionByZero(ValidationError, ZeroDivisionError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class VariableOutOfRange(ValidationError):
    pass


class CtxMismatch(ValidationError):
    """Operands built under different contexts."""


class NotAUnit(ValidationError):
    """Inversion of an element whose image in F_q vanishes."""


class IndexOutOfRange(ValidationError, IndexError):
    pass


class NoSolution(ValidationError):
    """No degree bounds within the inputs admit a matching rational function."""


class NotACurveZeta(ValidationError):
    """Input zeta function does not have the structure of a curve's."""


class CapError(Error):
    """Work refused because it exceeds a configured cap."""


class SizeCapExceeded(CapError):
    """Matrix dimension W above the hard cap."""

    def __init__(self, w, cap):
        super().__init__(f"matrix dimension W = {w} exceeds the size cap {cap}")
        self.w = w
        self.cap = cap


class CapExceeded(CapError):
    """Brute-force enumeration would exceed the evaluation cap."""

    def __init__(self, count, cap):
        super().__init__(f"enumeration of {count} points exceeds the cap {cap}")
        self.count = count
        self.cap = cap


class ConsistencyError(Error):
    """An identity the mathematics guarantees failed: implementation bug."""


class PrecisionLoss(ConsistencyError):
    """An exact division by a power of p failed during series computation."""


class InexactDivision(ConsistencyError):
    """A quantity the trace formula guarantees divisible was not."""


class NonIntegerTrace(ConsistencyError):
    """The Dwork trace came out with nonzero pi or mu components."""
