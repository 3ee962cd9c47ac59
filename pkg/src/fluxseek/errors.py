"""Exception types shared across the drive simulator."""


class FluxseekError(Exception):
    """Base class for all package errors."""


class ConfigError(FluxseekError):
    """Invalid configuration. ``key`` is the dotted path of the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class FluxFloorError(FluxseekError):
    """Rotor flux at or below the protective floor where slip and Eq-style
    compensation formulas diverge."""


class NonFiniteError(FluxseekError):
    """A NaN or infinity reached a simulation state or operation input."""


class InferenceError(FluxseekError):
    """No fuzzy rule fired. Unreachable for a rule base that passes the
    coverage check; raised only to surface a defect."""


class SearchModeError(FluxseekError):
    """A search operation was invoked outside its valid drive mode."""


class SimulationDivergedError(FluxseekError):
    """The closed-loop integration produced a non-finite state."""

    def __init__(self, step_index: int, message: str = "non-finite state"):
        self.step_index = step_index
        super().__init__(f"step {step_index}: {message}")
