"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a closed-form expression."""


class InvalidOperator(ValueError):
    """A matrix fails the Hermiticity / positivity / normalisation checks."""


class UnreachableOutcome(ValueError):
    """A measurement branch has (numerically) zero probability."""


class InfeasibleStatistics(ValueError):
    """Observed witness values are inconsistent with any qubit strategy."""


class StrategyFormatError(ValueError):
    """A strategy document is malformed; ``location`` points at the offending field."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
