"""Exception hierarchy.

Every error raised by the toolkit derives from ``NHQMError``.  The two
intermediate classes decide the command-line exit status: ``InputError``
maps to 2 and ``NumericalError`` maps to 3.
"""


class NHQMError(Exception):
    exit_code = 1


class InputError(NHQMError):
    exit_code = 2


class NumericalError(NHQMError):
    exit_code = 3


# --- input problems -------------------------------------------------------

class DimensionMismatch(InputError):
    pass


class SchemaError(InputError):
    pass


class ParseError(InputError):
    """Expression could not be parsed or evaluated; ``offset`` is a byte index or None."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class ExpressionSyntaxError(ParseError):
    pass


class UnknownFunction(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


class DivisionByZero(ParseError):
    pass


class ResonanceError(InputError):
    pass


class GridMismatch(InputError):
    pass


class NotPTInvariant(InputError):
    pass


# --- numerical failures ---------------------------------------------------

class NonConvergence(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class NotHermitian(NumericalError):
    pass


class Overflow(NumericalError):
    pass


class Singular(NumericalError):
    pass


class BrokenSymmetry(NumericalError):
    pass


class ComplexSpectrum(NumericalError):
    pass


class MetricMismatch(NumericalError):
    pass


class NonFinite(NumericalError):
    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"{message} (first at step {index})")
        self.index = index


class DefectiveMonodromy(NumericalError):
    pass


class GapClosure(NumericalError):
    pass


class NotInvariant(NumericalError):
    pass


class SingularTheta(NumericalError):
    pass


class ConstraintViolation(NumericalError):
    pass
