from typing import List, Optional


class MacAuthError(Exception):
    """Base class for library errors."""


class InvalidDistributionError(MacAuthError, ValueError):
    pass


class DimensionMismatchError(MacAuthError, ValueError):
    pass


class SymbolOutOfRangeError(MacAuthError, ValueError):
    pass


class EmptySequenceError(MacAuthError, ValueError):
    pass


class CodebookGenerationError(MacAuthError):
    pass


class InvalidAttackError(MacAuthError, ValueError):
    pass


class LinearProgramError(MacAuthError):
    pass


class ConfigError(MacAuthError, ValueError):
    """Invalid experiment config. `errors` names the offending keys/rows/columns."""

    def __init__(self, message: str, errors: Optional[List[str]] = None) -> None:
        super().__init__(message)
        self.errors: List[str] = errors or []


class StageError(MacAuthError):
    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
