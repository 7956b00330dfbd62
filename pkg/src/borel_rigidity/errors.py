"""Exception hierarchy shared by the library and the command line."""


class ValidationError(ValueError):
    """Malformed or inconsistent input (CLI exit code 1)."""


class RefusalError(RuntimeError):
    """A computation was refused, e.g. a failed certificate or a non-equivariant map (exit code 2)."""


class NumericalFailure(ArithmeticError):
    """A numerical stage did not reach its tolerance (exit code 3)."""
