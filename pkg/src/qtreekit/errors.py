"""Exception types shared across the toolkit."""


class QtreekitError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(QtreekitError):
    """A declared precondition of an operation does not hold."""


class MetricError(QtreekitError):
    """A distance table violates the metric axioms."""


class CertificateError(QtreekitError):
    """A valence certificate could not be produced; the supplied map is not a valid quasi-isometry."""


class OrbitBudgetError(QtreekitError):
    """Orbit enumeration exceeded the configured point cap."""


class GraphFormatError(QtreekitError):
    """Malformed graph or generator-map file."""

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class LineReductionError(QtreekitError):
    """The two-sided reduction inequality failed on an orbit pair (raise the ray budget N)."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair
