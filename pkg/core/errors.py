"""Exception hierarchy shared by every quditsinglet module"""


class QuditSingletError(Exception):
    """Base class for all library errors"""


class DomainError(QuditSingletError, ValueError):
    """Argument outside the domain of an operation (bad site, dimension, size)"""


class ValidationError(QuditSingletError, ValueError):
    """Serialized input or configuration failed validation"""


class PreconditionError(QuditSingletError):
    """Input is well-formed but violates a mathematical precondition"""


class NumericalError(QuditSingletError, ArithmeticError):
    """State vector or operator is numerically corrupted"""


class ConvergenceError(QuditSingletError):
    """Iterative eigensolver did not reach the requested tolerance"""

    def __init__(self, message, iterations):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class BudgetError(QuditSingletError):
    """Exhaustive search exceeded its evaluation budget"""

    def __init__(self, message, best_so_far, evaluated):
        super().__init__(f"{message} (evaluated {evaluated} branches, best so far {best_so_far})")
        self.best_so_far = best_so_far
        self.evaluated = evaluated


class RegimeError(QuditSingletError):
    """Perturbative effective-model comparison requested outside its regime"""

    def __init__(self, message, ratio, separation=None):
        super().__init__(message)
        self.ratio = ratio
        self.separation = separation
