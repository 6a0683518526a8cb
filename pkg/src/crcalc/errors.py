"""Exception hierarchy shared by every layer of the package."""


class CRCalcError(Exception):
    """Base class for all errors raised by crcalc."""


# -- arithmetic ---------------------------------------------------------------

class ShapeMismatch(CRCalcError, ValueError):
    pass


class DivisionByZeroConstantTerm(CRCalcError, ZeroDivisionError):
    pass


class OrderExhausted(CRCalcError, ValueError):
    """A derivative was requested from a jet that has no order left."""


# -- expressions --------------------------------------------------------------

class ExprSyntaxError(CRCalcError, ValueError):
    """Malformed expression text.

    Attributes
    ----------
    position : int
        0-based character offset where parsing failed.
    expected : tuple of str
        Tokens that would have been accepted at ``position``.
    """

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnboundSymbol(CRCalcError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unbound symbol {self.name!r}"


# -- geometry -----------------------------------------------------------------

class GeometryError(CRCalcError, ValueError):
    """Base class for problems with the hypersurface or basepoint."""


class SingularGradient(GeometryError):
    pass


class NotStrictlyPseudoconvex(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


class NotOnSurface(GeometryError):
    pass


class ConsistencyFailure(CRCalcError, ArithmeticError):
    """A redundant structure equation failed beyond tolerance."""


# -- densities ----------------------------------------------------------------

class WeightError(CRCalcError, ValueError):
    pass


class NotReal(CRCalcError, ValueError):
    pass


class NotImaginary(CRCalcError, ValueError):
    pass


class VerificationFailure(CRCalcError):
    """Raised by the verification suites when a check does not pass."""
