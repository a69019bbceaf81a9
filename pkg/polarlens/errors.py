"""Exception hierarchy shared by the library and the command line."""


class PolarLensError(Exception):
    """Base class for every error raised by polarlens"""

    def details(self):
        return {}


class TensorFormatError(PolarLensError):
    """Malformed PLT1 file or invalid tensor contents"""


class DimensionError(PolarLensError):
    """Extent mismatch along a named axis"""

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis

    def details(self):
        return {'axis': self.axis} if self.axis else {}


class MaskError(PolarLensError):
    pass


class SolverError(PolarLensError):
    """Failure inside an iterative solve"""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration

    def details(self):
        return {'iteration': self.iteration} if self.iteration is not None else {}


class MetricError(PolarLensError):
    pass


class DiffractionError(PolarLensError):
    pass


class ConfigError(PolarLensError):
    """Run config violates its schema"""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def details(self):
        return {'field': self.field} if self.field else {}
