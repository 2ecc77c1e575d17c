class DelayBoundsError(Exception):
    """Base class for every error raised by the library."""


class InvalidInterval(DelayBoundsError):
    pass


class InvalidSplit(DelayBoundsError):
    pass


class DegenerateBasis(DelayBoundsError):
    pass


class UnsupportedSpace(DelayBoundsError):
    pass


class DimensionMismatch(DelayBoundsError):
    pass


class NotSquare(DimensionMismatch):
    pass


class AsymmetricMatrix(DelayBoundsError):
    pass


class InfeasiblePsi(DelayBoundsError):
    """The free-parameter matrix fails its PSD certificate."""


class SingularBasisChange(DelayBoundsError):
    pass


class ZeroChi(DelayBoundsError):
    pass


class ZeroMoment(DelayBoundsError):
    pass


class AlphaOutOfRange(DelayBoundsError):
    pass


class InfeasibleParams(DelayBoundsError):
    """Convexifier parameters violate the endpoint feasibility condition."""


class BudgetExhausted(DelayBoundsError):
    def __init__(self, kind, trials):
        super().__init__(f"no {kind} witness found within {trials} trials")
        self.kind = kind
        self.trials = trials


class InvalidConfig(DelayBoundsError):
    pass


class UnknownSuite(DelayBoundsError):
    pass


class ConfigParseError(DelayBoundsError):
    pass
