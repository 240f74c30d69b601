"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Shapes of tasks, prior rows or coefficient matrices disagree."""


class NonFiniteError(ValueError):
    """An input array contains NaN or infinite entries."""


class NegativeParameterError(ValueError):
    """A regularization weight is negative."""


class InvalidStepSizeError(ValueError):
    """A step-size parameter eta is zero or negative."""


class EigenConvergenceError(RuntimeError):
    """Power iteration did not reach its residual tolerance."""

    def __init__(self, message, iterations, residual, tolerance):
        super().__init__(
            f"{message}: residual {residual:.3e} > tolerance {tolerance:.3e} "
            f"after {iterations} iterations"
        )
        self.iterations = iterations
        self.residual = residual
        self.tolerance = tolerance


class StrongConvexityUnavailableError(RuntimeError):
    """The strong-convexity constant is zero, so the momentum method is ineligible."""


class StepSearchError(RuntimeError):
    """Forward back-tracking exhausted its step cap without acceptance."""

    def __init__(self, message, last_eta, residual):
        super().__init__(f"{message} (last eta {last_eta:.6e}, residual {residual:.3e})")
        self.last_eta = last_eta
        self.residual = residual


class PreconditionError(RuntimeError):
    """The hypothesis of an inequality check does not hold, so the check is inapplicable."""


class MissingReferenceError(ValueError):
    """A convergence certificate was requested without a reference optimum."""


class DegenerateLabelsError(ValueError):
    """Classification labels contain a single class."""


class UndefinedMetricError(ValueError):
    """The metric denominator is zero (e.g. all responses constant)."""


class InsufficientSamplesError(ValueError):
    """Too few samples for the requested statistic."""


class CsvParseError(ValueError):
    """A CSV file is malformed; message carries the path and line number."""


class TrainSizeError(ValueError):
    """A holdout split leaves no training or no test samples in some task."""
