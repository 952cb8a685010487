class ParrondoError(Exception):
    """Base class for every error raised by the engine."""


class StateError(ParrondoError, ValueError):
    """A coin state could not be parsed, normalized or constructed."""


class UnknownStateError(StateError, KeyError):
    """A named coin-state token is not in the registry."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ChainingError(ParrondoError, ValueError):
    """Consecutive steps are not daisy-chained."""

    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(message)


class DesignConstraintError(ParrondoError, ValueError):
    """A daisy-chain design violates one or more stride constraints."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("Design constraints violated: " + "; ".join(self.violations))


class ObservableError(ParrondoError, ValueError):
    """An observable token or spectral list is invalid."""


class ConfigError(ParrondoError, ValueError):
    """A run configuration is incomplete or inconsistent."""
