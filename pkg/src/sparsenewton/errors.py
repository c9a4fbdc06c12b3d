"""Exception types shared across the package."""


class InputContractError(ValueError):
    """An argument violates a documented precondition (shape, sign, finiteness)."""


class DivergenceError(RuntimeError):
    """A rollout produced a non-finite state.

    Attributes:
        step_index: time index j at which the state first became non-finite.
    """

    def __init__(self, step_index: int, message: str | None = None):
        self.step_index = step_index
        super().__init__(message or f"non-finite state at step {step_index}")


class DomainError(ValueError):
    """A convergence-bound formula was evaluated outside its domain of validity."""


class ConfigError(ValueError):
    """A problem configuration file is missing fields or inconsistent."""
