"""Exception types shared across the package.

Every error carries a short machine-parseable ``code`` so the CLI can emit
one-line diagnostics of the form ``error:CODE message``.
"""


class ResonatorLabError(Exception):
    code = "ERROR"


class DomainError(ResonatorLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    code = "DOMAIN"


class BudgetError(ResonatorLabError):
    """Enumeration or truncation size exceeds the configured budget."""

    code = "BUDGET"


class CapacityError(ResonatorLabError):
    """Requested table exceeds the configured memory budget."""

    code = "CAPACITY"


class NoGeneratorError(DomainError):
    """Unit group of the given modulus is not cyclic."""

    code = "NO_GENERATOR"


class ConvergenceError(ResonatorLabError):
    """Iterative solver failed to reach tolerance within its iteration cap."""

    code = "NO_CONVERGENCE"
