"""Exception hierarchy shared across the toolkit."""


class FluxgridError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(FluxgridError):
    """Grid shapes or tilings that do not line up."""


class TooSmallGridError(FluxgridError):
    """Grid too small for the requested stencil or spectrum."""


class DegenerateVarianceError(FluxgridError):
    """A metric denominator (field variance) is zero."""


class DegenerateSpectrumError(FluxgridError):
    """Zero spectral power inside the fit range; log-log fit undefined."""


class StabilityError(FluxgridError):
    """Explicit time step violates the stability (CFL) limits."""


class ConvergenceStallError(FluxgridError):
    """Line search could not find a descent step; carries the trace so far."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class FormatError(FluxgridError):
    """Malformed binary grid file; `offset` is the failing byte position."""

    def __init__(self, message, offset):
        super().__init__(message)
        self.offset = offset


class CsvParseError(FluxgridError):
    """Malformed CSV grid; carries 1-based row (and column when known)."""

    def __init__(self, message, row, col=None):
        super().__init__(message)
        self.row = row
        self.col = col
