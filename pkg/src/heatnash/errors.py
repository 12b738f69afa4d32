"""Exception hierarchy."""


class HeatNashError(Exception):
    pass


class ConfigurationError(HeatNashError, ValueError):
    """Invalid problem data or options (bad grid sizes, overlapping regions, negative caps...)."""


class StructuralError(HeatNashError, ValueError):
    """Arrays that do not conform to the grids or masks they are used with."""


class ContractViolation(HeatNashError, ValueError):
    """A documented precondition does not hold, e.g. an inadmissible control."""


class LinearSolveError(HeatNashError, ArithmeticError):
    """The tridiagonal factorization hit a zero pivot."""
