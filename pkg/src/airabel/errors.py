"""Exception hierarchy. Each class carries a stable machine-readable ``code``."""


class AirError(Exception):
    code = "error"


class InvalidArgumentError(AirError, ValueError):
    code = "invalid_argument"


class DomainError(AirError, ValueError):
    code = "domain_error"


class PoleError(AirError, ValueError):
    """A special function was asked to evaluate at a pole of its parameters."""

    code = "pole"


class ConvergenceError(AirError, ArithmeticError):
    code = "no_convergence"


class UnsupportedParameterError(AirError, ValueError):
    code = "unsupported_parameter"


class ClassificationError(AirError):
    code = "classification_failed"


class UnsupportedClassError(AirError):
    code = "unsupported_class"


class BasisDegeneracyError(AirError):
    code = "degenerate_basis"


class EvaluationError(AirError, ArithmeticError):
    """A level function could not be evaluated at the requested point."""

    code = "evaluation_failed"


class ParseError(AirError, ValueError):
    code = "syntax_error"

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ShapeError(AirError, ValueError):
    code = "shape_error"
