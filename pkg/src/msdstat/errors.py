"""Exception hierarchy for the msdstat package."""


class MsdError(Exception):
    """Base class for all msdstat errors."""


class DataError(MsdError):
    """Invalid observations, dataset, configuration, or input file."""


class DomainError(MsdError):
    """Argument outside the mathematical domain of a function."""


class ConvergenceError(MsdError):
    """Numerical integration or root finding failed to converge."""


class TableRangeError(MsdError):
    """Requested point lies outside the support of an interpolation table."""
