"""Search supervisor: steady-state detection, slow power sampling, fuzzy step
application with clamping, and abandonment on command changes.

The drive has two positions. During transients the excitation command is held
at rated for best dynamic response. Once the speed error has stayed inside a
small band long enough, the supervisor samples dc-link power on a slow period
and walks the excitation command toward minimum input power; any speed or
load command change abandons the search immediately and clears its history.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import SearchModeError
from .fuzzy import EfficiencyController, efficiency_step


class DriveMode(Enum):
    TRANSIENT_RATED_FLUX = "transient"
    STEADY_SEARCH = "search"


@dataclass(frozen=True)
class SearchSettings:
    """Supervisor thresholds and periods (all config keys)."""

    search_period: float              # s between power samples
    steady_speed_tolerance: float     # rad/s band for steady-state detection
    steady_steps: int                 # consecutive in-band steps before search
    convergence_step_fraction: float  # of I_b; applied steps below it count
    convergence_samples: int          # consecutive small steps to flag converged
    initial_step_fraction: float      # of I_b; exploratory first decrement

    def __post_init__(self) -> None:
        if self.search_period <= 0.0:
            raise ValueError("search_period must be > 0")
        if self.steady_speed_tolerance <= 0.0:
            raise ValueError("steady_speed_tolerance must be > 0")
        if self.steady_steps < 1:
            raise ValueError("steady_steps must be >= 1")
        if not 0.0 < self.convergence_step_fraction < 1.0:
            raise ValueError("convergence_step_fraction must be in (0, 1)")
        if self.convergence_samples < 1:
            raise ValueError("convergence_samples must be >= 1")
        if not 0.0 < self.initial_step_fraction <= 1.0:
            raise ValueError("initial_step_fraction must be in (0, 1]")


@dataclass
class SearchState:
    """Mutable supervisor state, owned and advanced by one simulation loop."""

    mode: DriveMode = DriveMode.TRANSIENT_RATED_FLUX
    previous_power: float | None = None
    last_di_ds: float = 0.0
    steady_counter: int = 0
    sample_timer: float = 0.0
    converged: bool = False
    convergence_counter: int = 0
    awaiting_first_step: bool = field(default=False, repr=False)

    def _enter_transient(self) -> None:
        self.mode = DriveMode.TRANSIENT_RATED_FLUX
        self.previous_power = None
        self.last_di_ds = 0.0
        self.steady_counter = 0
        self.sample_timer = 0.0
        self.converged = False
        self.convergence_counter = 0
        self.awaiting_first_step = False

    def _enter_search(self) -> None:
        self.mode = DriveMode.STEADY_SEARCH
        self.previous_power = None
        self.last_di_ds = 0.0
        self.sample_timer = 0.0
        self.converged = False
        self.convergence_counter = 0
        self.awaiting_first_step = False


def update_mode(
    state: SearchState,
    settings: SearchSettings,
    speed_error: float,
    command_changed: bool,
) -> SearchState:
    """Advance the mode machine one integration step.

    A command change or a speed error outside the band resets to the
    rated-flux transient position with cleared history; holding the error
    in-band for ``steady_steps`` consecutive steps enters the search.
    """
    in_band = abs(speed_error) <= settings.steady_speed_tolerance
    if command_changed or not in_band:
        state._enter_transient()
        return state
    if state.mode is DriveMode.TRANSIENT_RATED_FLUX:
        state.steady_counter += 1
        if state.steady_counter >= settings.steady_steps:
            state._enter_search()
    return state


def advance_sample_timer(state: SearchState, settings: SearchSettings, dt: float) -> bool:
    """Accumulate search-period time. True when a power sample is due."""
    if state.mode is not DriveMode.STEADY_SEARCH:
        return False
    state.sample_timer += dt
    if state.sample_timer >= settings.search_period:
        state.sample_timer -= settings.search_period
        return True
    return False


def search_sample(
    state: SearchState,
    settings: SearchSettings,
    ctrl: EfficiencyController,
    p_d: float,
    omega_r: float,
    i_ds_cmd: float,
    i_qs_cmd: float,
) -> tuple[SearchState, float]:
    """One slow-period power sample; returns the new excitation command.

    The first sample after mode entry only primes the power memory (the power
    increment is undefined without a predecessor). The next sample launches
    the search with the configured exploratory decrement; after that, steps
    come from the fuzzy controller. The recorded last step is the applied,
    post-clamp one, so direction memory reflects reality, and the convergence
    flag is true exactly when the last ``convergence_samples`` applied steps
    were each below threshold.

    With direction memory exactly zero the antisymmetric rule table
    recommends no move for any power change; in the closed loop the converged
    tail keeps a tiny nonzero step, so sustained power drift re-arms stepping
    within a few samples as the memory regrows.
    """
    if state.mode is not DriveMode.STEADY_SEARCH:
        raise SearchModeError("search_sample called outside SteadySearch mode")
    if state.previous_power is None:
        state.previous_power = p_d
        state.awaiting_first_step = True
        return state, i_ds_cmd

    i_b = ctrl.output_base(omega_r, i_ds_cmd, i_qs_cmd)
    if state.awaiting_first_step:
        di = -settings.initial_step_fraction * i_b
        state.awaiting_first_step = False
    else:
        di = efficiency_step(
            ctrl, p_d - state.previous_power, omega_r, i_ds_cmd, i_qs_cmd,
            state.last_di_ds,
        )
    lo = ctrl.params.min_excitation_current
    hi = ctrl.params.rated_excitation_current
    new_cmd = min(max(i_ds_cmd + di, lo), hi)
    applied = new_cmd - i_ds_cmd

    state.last_di_ds = applied
    state.previous_power = p_d
    if abs(applied) < settings.convergence_step_fraction * i_b:
        state.convergence_counter += 1
    else:
        state.convergence_counter = 0
    state.converged = state.convergence_counter >= settings.convergence_samples
    return state, new_cmd
