"""Exception hierarchy shared across the package.

The split mirrors the CLI exit codes: data problems (unreadable or
degenerate inputs) versus numeric preconditions (quantities that are
mathematically undefined or outside a formula's domain).
"""


class EvaluationError(Exception):
    """Base class for all errors raised by this package."""


class DataError(EvaluationError):
    """Malformed or degenerate input data (bad file, single-class dataset, ...)."""


class NumericError(EvaluationError):
    """A numeric precondition is violated; the requested quantity is undefined."""


class UndefinedMetricError(NumericError):
    """A metric resolves to 0/0 (e.g. precision with no predicted positives)."""


class PreconditionError(NumericError):
    """Interval-arithmetic preconditions unmet (e.g. half-width >= point estimate)."""
