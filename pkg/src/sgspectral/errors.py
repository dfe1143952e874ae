"""Exception hierarchy shared by all modules."""


class SpectralError(Exception):
    """Base class for solver errors."""


class TailNotIntegrable(SpectralError):
    pass


class StepFailure(SpectralError):
    def __init__(self, message: str, location: float | None = None):
        super().__init__(message if location is None else f"{message} (x = {location:.6g})")
        self.location = location


class NearZeroZ(SpectralError):
    pass


class InconsistentJost(SpectralError):
    pass


class GridTooCoarse(SpectralError):
    pass


class HypothesisNotMet(SpectralError):
    """Raised when a theorem's hypotheses fail; ``report`` carries what could still be computed."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NonPositiveDerivative(SpectralError):
    pass


class NotAnEigenvalue(SpectralError):
    pass


class ZeroOnContour(SpectralError):
    pass


class SubdivisionLimit(SpectralError):
    def __init__(self, message: str, cell=None):
        super().__init__(message)
        self.cell = cell


class ConfigError(SpectralError):
    pass
