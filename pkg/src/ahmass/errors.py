"""Exception hierarchy shared by all modules."""


class AHMassError(Exception):
    """Base class for errors raised by :mod:`ahmass`."""


class DomainError(AHMassError, ValueError):
    """A point lies outside the open domain of its chart."""


class DomainMarginError(DomainError):
    """A finite-difference stencil would leave the chart domain."""


class DegenerateMetricError(AHMassError, ValueError):
    """A metric matrix is singular or numerically degenerate."""


class NotKillingError(AHMassError, ValueError):
    """A one-form offered as a Euclidean Killing form is not one."""


class SuperluminalError(AHMassError, ValueError):
    """A boost velocity with |v| >= 1."""


class PoleAtInfinityError(AHMassError, ArithmeticError):
    """A Lorentz matrix sends a sphere point to the pole at infinity."""


class NotSpacelikeError(AHMassError, ValueError):
    """A graph hypersurface has |df| >= 1 somewhere."""


class ConstructionError(AHMassError, RuntimeError):
    """A deterministic construction failed its own acceptance check."""

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class DivergenceError(AHMassError, ArithmeticError):
    """An extrapolated sequence of sphere integrals does not converge."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class ConfigError(AHMassError, ValueError):
    """A run configuration violates its schema or scenario invariants."""
