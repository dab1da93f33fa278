"""Exception hierarchy shared by the evaluators and the check engine."""


class EvalError(ValueError):
    """A function could not be evaluated at ``x``."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DomainError(EvalError):
    pass


class PoleError(DomainError):
    """Argument is a pole (0, -1, -2, ...) of the psi family."""


class ConvergenceError(EvalError):
    pass
