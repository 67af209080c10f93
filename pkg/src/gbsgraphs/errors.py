"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input or violated precondition."""


class NotEmbeddableError(ValidationError):
    """The requested graph cannot be prepared on the device."""

    def __init__(self, code: str, reason: str):
        super().__init__(f"graph {code} is not embeddable: {reason}")
        self.code = code
        self.reason = reason


class SampleFormatError(ValidationError):
    """A sample file violates the one-shot-per-line format."""

    def __init__(self, path, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = str(path)
        self.line = line
        self.reason = reason


class InternalError(RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""
