"""Exception and warning types raised across the package."""


class CascadeError(Exception):
    """Base class for all errors raised by odecascade."""


class CenterMismatchError(CascadeError, ValueError):
    """Two truncated series were combined with different expansion points."""


class NonFiniteError(CascadeError, ArithmeticError):
    """A coefficient or evaluated value overflowed to inf or became NaN."""


class DivergenceError(NonFiniteError):
    """The Taylor recurrence produced a non-finite coefficient.

    ``order`` is the index of the first offending coefficient.
    """

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"non-finite Taylor coefficient at order {order}")


class InvalidGaugeError(CascadeError, ValueError):
    """A gauge has a zero entry or is too short for the requested truncation."""


class UnsupportedCombinationError(CascadeError, ValueError):
    """No closed form is known for the requested (phi, gauge) pair."""


class WrongSolverError(CascadeError, ValueError):
    """The constant-coefficient solver was given a system with non-constant f."""


class OutOfDomainError(CascadeError, ValueError):
    """A closed-form solution was evaluated outside its domain of validity."""


class BlowUpError(CascadeError, ArithmeticError):
    """The step size collapsed during numerical integration, suggesting a singularity."""


class ConfigError(CascadeError, ValueError):
    """A run configuration failed validation.

    ``path`` is a JSON-path string pointing at the offending field.
    """

    def __init__(self, message, path="$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class OutsideConvergenceDiskWarning(UserWarning):
    """A series was evaluated outside its estimated disk of convergence."""


class ModelValidityWarning(UserWarning):
    """The time-dependent cascade is only consistent with the IVP when g is zero."""
