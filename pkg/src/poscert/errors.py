"""Exception types shared across the package."""


class ShapeError(ValueError):
    "Raised when matrix/vector dimensions do not line up."


class DomainError(ValueError):
    "Raised when an input is outside an operation's mathematical domain."


class ConvergenceError(RuntimeError):
    "Raised when an iterative routine hits its iteration cap; carries the residual."

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ValidationError(ValueError):
    "Raised when a serialized document fails validation; names the offending field."

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigurationError(ValueError):
    "Raised when a certificate routine is called on a system shape it does not handle."


class PreconditionError(ValueError):
    "Raised when a documented operation precondition is violated."
