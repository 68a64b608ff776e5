"""Exception hierarchy for cocircular."""


class CocircularError(ValueError):
    """Base class for all errors raised by the package."""


class DomainError(CocircularError):
    """Argument outside the mathematical domain: nonpositive length, collision or singular pair."""


class NumericError(CocircularError):
    """A numerical routine failed to reach its tolerance."""


class UsageError(CocircularError):
    """Operation applied outside its precondition."""


class SpecFileError(CocircularError):
    """Problem-spec file could not be parsed; names the offending field."""

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        self.reason = message
        super().__init__(f"{field}: {message}")
