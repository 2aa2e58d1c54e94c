"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible dimensions, or the dimension is unsupported."""


class ParseError(ValueError):
    """Input text is not a well-formed system document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(ValueError):
    """A well-formed document violates a structural invariant.

    ``field`` names the offending field when known.
    """

    def __init__(self, message: str, field: str | None = None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class ResourceError(RuntimeError):
    """A guarded operation would exceed its resource limit (e.g. refinement level)."""


class InconclusiveError(RuntimeError):
    """The verdict cannot be trusted because the node budget was exhausted."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_estimate: float):
        super().__init__(f"{message} (last estimate {last_estimate!r})")
        self.last_estimate = last_estimate
