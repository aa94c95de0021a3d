"""Error taxonomy shared across the solver modules.

Split by what went wrong, not where: configuration mistakes, invalid
physical states, quadrature/weight blow-ups, and failed time steps.
"""


class ConfigError(ValueError):
    """Inconsistent or out-of-range configuration values."""


class DomainError(ValueError):
    """Arguments outside the mathematical domain of an operator."""


class StateError(ValueError):
    """Physically inadmissible state (rho <= 0, theta <= 0, ...)."""


class NumericError(ArithmeticError):
    """Non-finite or divergent numerical result."""


class StepError(RuntimeError):
    """A time step failed, e.g. a CFL violation; message names the cell."""
