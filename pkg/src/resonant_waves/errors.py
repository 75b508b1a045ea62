"""Exception types shared by the solver modules."""


class SupportError(ValueError):
    """A series has spectral support outside the subspace an operation expects."""


class RadiusError(ValueError):
    """A composition argument violates the analyticity-radius guard."""


class UncertifiedError(RuntimeError):
    """A diagonal inverse was requested without a passing bound certificate."""


class DivergenceError(RuntimeError):
    """A fixed-point iteration failed to contract."""


class SearchError(RuntimeError):
    """A critical-point search exhausted its seeds without converging."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage tag for reporting."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class ConfigError(ValueError):
    """A run configuration is malformed or violates a precondition."""
