"""Exception and warning classes shared across the package."""


class RegDelocError(Exception):
    """Base class for all errors raised by regdeloc."""


class GraphError(RegDelocError, ValueError):
    """Invalid graph input."""


class MalformedLine(GraphError):
    def __init__(self, lineno, text):
        super().__init__(f"line {lineno}: expected 'u v' with integer ids, got {text!r}")
        self.lineno = lineno
        self.text = text


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class NonRegular(GraphError):
    pass


class NotSimple(GraphError):
    pass


class UnsupportedDegree(GraphError):
    """Degree parameter d < 2 (the (d - 1) factors vanish at d = 1)."""


class ParityError(GraphError):
    pass


class RejectionLimitExceeded(RegDelocError, RuntimeError):
    pass


class SizeBudgetExceeded(RegDelocError, ValueError):
    pass


class NOddError(RegDelocError, ValueError):
    pass


class DepthTooSmall(RegDelocError, ValueError):
    pass


class OracleInconsistency(RegDelocError, AssertionError):
    pass


class UnsupportedExponent(RegDelocError, ValueError):
    pass


class BadExponent(UnsupportedExponent):
    pass


class DegenerateRange(RegDelocError, ValueError):
    pass


class MassBelowEpsilon(RegDelocError, ValueError):
    pass


class RecipeMismatch(RegDelocError, ValueError):
    pass


class ScanLimitTooSmall(UserWarning):
    """Girth exceeds the scan limit; reported values are lower bounds."""


class SupportExceedsN(UserWarning):
    """Kernel support radius is larger than the certified radius N."""
