"""Exception types shared across the package.

Every domain error raised by the library derives from VFieldError so callers
(and the CLI) can distinguish domain failures from programming errors.
"""


class VFieldError(Exception):
    """Base class for all domain errors raised by this package."""


class DivisionByZero(VFieldError):
    """Exact division by a zero scalar or rational function."""


class ZeroDivisor(VFieldError):
    """Polynomial division by zero or by a divisor with a non-unit leading
    coefficient in the division variable."""


class ZeroPolynomial(VFieldError):
    """An operation that requires a nonzero polynomial received zero."""


class UnknownVariable(VFieldError):
    """An expression references a variable the vector field does not declare."""


class NotPolynomialField(VFieldError):
    """An operation that requires polynomial components received a field with
    genuine denominators."""


class PositiveDimensionalSingularLocus(VFieldError):
    """The singular locus contains a curve; the point list is not finite."""


class UnsupportedDegree(VFieldError):
    """Singular-point computation outside the supported planar degree range."""


class ArityZero(VFieldError):
    """Interior product applied to a 0-form."""


class NonRepresentableCoefficient(VFieldError):
    """A log coefficient is not a rational combination of the declared basis."""


class DegenerateParameters(VFieldError):
    """Parameter values violate a nondegeneracy requirement (e.g. b = d)."""


class NotNormalized(VFieldError):
    """The operation requires the normalized a = c = 1 form of the system."""


class PoleEncountered(VFieldError):
    """Evaluation hit a zero denominator."""


class NonFiniteState(VFieldError):
    """Numeric integration produced an overflow or NaN at the starting step."""


class SignChange(VFieldError):
    """A trajectory crossed a coordinate axis; the log branch is undefined."""


class DuplicateEquation(VFieldError):
    """The system text assigns two equations to the same variable."""


class UndeclaredName(VFieldError):
    """The system text references a name that was never declared."""


class DSLSyntaxError(VFieldError):
    """Malformed system text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column
