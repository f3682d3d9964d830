"""Exception and warning types shared across the package.

Validation problems (bad inputs, shapes, configuration) derive from
``ValidationError``; numerical breakdowns (non-convergence, singular
systems, diverged training) derive from ``NumericalError``.  The CLI maps
the former to exit code 1 and the latter to exit code 2.
"""


class EquicastError(Exception):
    """Base class for all package errors."""


class ValidationError(EquicastError):
    """Bad input data, shapes, or configuration."""


class NumericalError(EquicastError):
    """A numerical procedure failed (singularity, divergence, overflow)."""


# ---------------------------------------------------------------- ingestion

class MissingColumn(ValidationError):
    pass


class UnparseableRow(ValidationError):
    def __init__(self, line_number, message=""):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}" if message else f"line {line_number}")


class NonPositivePrice(ValidationError):
    def __init__(self, date):
        self.date = date
        super().__init__(f"non-positive price at {date}")


class DuplicateDate(ValidationError):
    def __init__(self, date):
        self.date = date
        super().__init__(f"duplicate date {date}")


# ------------------------------------------------------------------- series

class SeriesTooShort(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


# -------------------------------------------------------------------- stats

class LagTooLarge(ValidationError):
    pass


class SingularToeplitz(NumericalError):
    pass


class SingularRegression(NumericalError):
    pass


class DegenerateVariance(ValidationError):
    pass


# -------------------------------------------------------------------- garch

class InvalidParams(ValidationError):
    pass


class NonFiniteLikelihood(NumericalError):
    pass


class TooFewObservations(ValidationError):
    pass


class DegenerateSeries(ValidationError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, iterations, message=""):
        self.iterations = iterations
        super().__init__(message or f"no convergence after {iterations} iterations")


class InvalidHorizon(ValidationError):
    pass


# ---------------------------------------------------------------------- var

class SingularDesign(NumericalError):
    pass


class OrderTooLarge(ValidationError):
    pass


class SingularCovariance(NumericalError):
    pass


# ------------------------------------------------------------------- neural

class BadDims(ValidationError):
    pass


class NonFiniteGradient(NumericalError):
    pass


class DivergedTraining(NumericalError):
    pass


# ------------------------------------------------------------------ metrics

class ZeroActual(ValidationError):
    pass


class ZeroDenominator(ValidationError):
    pass


# ----------------------------------------------------------------- warnings

class DegenerateDataWarning(UserWarning):
    """Degenerate input handled with a conventional fallback instead of an error."""
