"""Exception hierarchy shared by all modules."""


class EfrosError(Exception):
    """Base class for every error raised by the package."""


class DomainError(EfrosError, ValueError):
    """A parameter lies outside the validity domain of an operation."""


class QuadratureError(EfrosError, ArithmeticError):
    """An integral could not be evaluated (NaN integrand, tail not found, no convergence)."""


class NonConvergenceError(EfrosError, ArithmeticError):
    """A series did not converge within its term budget."""


class CancellationError(EfrosError, ArithmeticError):
    """A route lost too many digits to cancellation to be trusted."""
