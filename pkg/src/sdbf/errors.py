"""Exception types shared across the package."""


class SdbfError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SdbfError, ValueError):
    pass


class DegenerateDataError(SdbfError, ValueError):
    """Data with zero variance in the reference vector."""


class InsufficientDataError(SdbfError, ValueError):
    pass


class ShapeError(SdbfError, ValueError):
    pass


class InitializationError(SdbfError, RuntimeError):
    pass


class EstimationError(SdbfError, ValueError):
    pass


class ConfigurationError(SdbfError, ValueError):
    pass


class NumericalError(SdbfError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataParseError(SdbfError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
