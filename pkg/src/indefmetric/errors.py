"""Exception hierarchy shared by all modules."""


class IndefMetricError(Exception):
    """Base class for every error raised by this package."""


class NonHermitian(IndefMetricError, ValueError):
    pass


class AuxNotPositive(IndefMetricError, ValueError):
    pass


class SingularEta(IndefMetricError, ValueError):
    pass


class NotPositiveSemidefinite(IndefMetricError, ValueError):
    pass


class DegreeOverflow(IndefMetricError, ValueError):
    """Raised when an operation would leave the truncated degree budget.

    This is a statement about the truncation, not about physics.
    """


class NotHermitian(IndefMetricError, ValueError):
    """The Wightman functional fails ``W(f*) = conj(W(f))``."""


class DimensionOverflow(IndefMetricError, ValueError):
    pass


class ModeMismatch(IndefMetricError, ValueError):
    pass


class EmptySubspace(IndefMetricError, RuntimeError):
    pass


class GridMismatch(IndefMetricError, ValueError):
    pass


class StepTooLarge(IndefMetricError, ArithmeticError):
    pass


class LandauGauge(IndefMetricError, ValueError):
    pass


class NotSpacelike(IndefMetricError, ValueError):
    pass


class ConfigInvalid(IndefMetricError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ReportWriteFailed(IndefMetricError, OSError):
    pass
