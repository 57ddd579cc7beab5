"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument fell outside the mathematical domain of an operation."""


class PortfolioFormatError(ValueError):
    """A grade table could not be parsed into a valid portfolio.

    Carries the 1-based line number of the offending record when one can
    be attributed.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SimulationResourceError(RuntimeError):
    """A simulation request exceeded addressable or allocatable resources."""
