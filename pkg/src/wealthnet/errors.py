"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes (parameter 2, numerical 3, I/O 4), so
library code should raise one of them rather than bare ValueError/RuntimeError
whenever the failure is meaningful to a caller.
"""


class ParameterError(ValueError):
    """A parameter is outside its admissible domain."""


class InsufficientDataError(ValueError):
    """Not enough samples to carry out an estimate."""


class NumericalError(RuntimeError):
    """Numerical instability detected while integrating.

    ``step`` carries the 1-based step index at which the problem appeared,
    when known.
    """

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step
