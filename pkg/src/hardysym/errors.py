"""Exception hierarchy shared by all modules."""


class WorkbenchError(ValueError):
    """Base class for all workbench errors."""


class DomainError(WorkbenchError):
    """A mathematical precondition is violated (non-integrable weight, bad exponent...)."""


class ParameterError(DomainError):
    """A problem-parameter validity clause is violated; the message names the clause."""


class ConfigurationError(WorkbenchError):
    """Inconsistent grid / experiment configuration."""


class UsageError(WorkbenchError):
    """API misuse: mismatched shapes, wrong grid kind, missing data."""


class DegenerateInputError(WorkbenchError):
    """Input is degenerate for the requested operation (zero function, zero denominator)."""
