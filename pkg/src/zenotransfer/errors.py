"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical or protocol parameter is outside its allowed range."""


class NumericBreakdown(ArithmeticError):
    """A computation left its domain of validity (underflow, expansion breakdown)."""


class ConfigError(ValueError):
    """Invalid run configuration; carries the offending key when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
