"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: InputError -> 3, AccuracyError -> 4,
validation failures (residual above tolerance) -> 2.
"""


class EhglueError(Exception):
    """Base class for all package errors."""


class InputError(EhglueError):
    """Invalid argument, malformed file, or violated precondition."""


class LoadError(InputError):
    """Malformed or inconsistent jet file."""


class DomainError(InputError):
    """Evaluation requested outside a field's chart domain."""


class PreconditionError(InputError):
    """An operation's stated precondition does not hold."""


class AccuracyError(EhglueError):
    """Numeric differentiation or quadrature failed to converge."""


class AdmissibilityError(EhglueError):
    """Gluing parameter t too large for a positive-definite glued metric."""


class InternalError(EhglueError):
    """A solve that is guaranteed to succeed did not; indicates a bug."""
