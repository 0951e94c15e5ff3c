class AptreeException(Exception):
    """Base class for all exceptions raised by aptree."""


class UserError(AptreeException):
    """Exception raised when the caller passes invalid arguments or configuration."""

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class DomainError(UserError):
    """Exception raised when an operation is evaluated outside its domain, e.g. at a negative
    radial coordinate or with an edge restriction at a point that is not a vertex.
    """


class NonConvergenceError(AptreeException):
    """Exception raised when adaptive quadrature cannot meet the requested tolerance."""

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class DivergenceError(AptreeException):
    """Exception raised when an integral that must be finite diverges."""

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class SolverError(AptreeException):
    """Exception raised when the arc-length inverse cannot be bracketed. This usually means the
    metric weight was declared with an unbounded tail but is in fact integrable.
    """

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class DegenerateConstructionError(AptreeException):
    """Exception raised when a Poincare certificate cannot separate its two regions."""

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class BudgetExceeded(AptreeException):
    """Exception raised when a level, piece, vertex or node budget is exceeded."""

    message: str

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)
