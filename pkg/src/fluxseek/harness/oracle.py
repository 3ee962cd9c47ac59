"""Brute-force steady-state sweep: ground truth for the search.

Field orientation makes the steady state algebraic: Psi = L_m * i_ds, the
torque current follows from the demanded torque, slip from the two, and the
loss model evaluates directly. No dynamics are integrated, so the sweep is an
independent cross-check of where the closed-loop search settles.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..machine import InductionMachine, LossBreakdown, MachineState
from .config import DriveConfig


@dataclass(frozen=True)
class OraclePoint:
    i_ds: float
    i_qs: float
    rotor_flux: float
    input_power: float
    losses: LossBreakdown | None
    feasible: bool


@dataclass(frozen=True)
class OracleSweepResult:
    speed: float
    load_torque: float
    best_i_ds: float
    min_input_power: float
    points: tuple[OraclePoint, ...]

    @property
    def feasible_points(self) -> tuple[OraclePoint, ...]:
        return tuple(p for p in self.points if p.feasible)


def steady_state_point(
    machine: InductionMachine, speed: float, load_torque: float, i_ds: float
) -> OraclePoint:
    """Exact field-oriented steady state at one excitation value.

    The developed torque must cover the load plus viscous friction. Points
    whose torque current exceeds the drive limit are marked infeasible.
    """
    p = machine.params
    psi = p.magnetizing_inductance * i_ds
    t_e = load_torque + p.friction * speed
    i_qs = t_e / (p.torque_constant_flux * psi)
    if abs(i_qs) > p.max_torque_current:
        return OraclePoint(
            i_ds=i_ds, i_qs=i_qs, rotor_flux=psi,
            input_power=float("inf"), losses=None, feasible=False,
        )
    omega_e = p.pole_pairs * speed + machine.slip_frequency(i_qs, psi)
    state = MachineState(
        rotor_flux=psi, rotor_speed=speed, i_ds=i_ds, i_qs=i_qs,
        synchronous_angle=0.0, simulated_time=0.0,
    )
    losses = machine.compute_losses(state, omega_e)
    return OraclePoint(
        i_ds=i_ds, i_qs=i_qs, rotor_flux=psi,
        input_power=machine.input_power(state, t_e, losses),
        losses=losses, feasible=True,
    )


def oracle_sweep(
    speed: float, load_torque: float, grid_size: int, config: DriveConfig
) -> OracleSweepResult:
    """Evaluate grid_size excitation values on [min, rated] and return the
    minimizer plus the whole curve.

    A single-point grid evaluates rated excitation (the point the operating
    envelope guarantees feasible). Infeasible grid points stay in the curve
    but are excluded from the minimum.
    """
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    params = config.machine
    machine = InductionMachine(params)
    rated = params.rated_excitation_current
    if not steady_state_point(machine, speed, load_torque, rated).feasible:
        raise ValueError(
            f"operating point (speed {speed:g}, torque {load_torque:g}) is not"
            " reachable at rated excitation"
        )
    lo = params.min_excitation_current
    if grid_size == 1:
        grid = [rated]
    else:
        span = rated - lo
        grid = [lo + span * i / (grid_size - 1) for i in range(grid_size - 1)]
        grid.append(rated)

    points = tuple(steady_state_point(machine, speed, load_torque, x) for x in grid)
    best = min(
        (p for p in points if p.feasible), key=lambda p: p.input_power
    )
    return OracleSweepResult(
        speed=speed,
        load_torque=load_torque,
        best_i_ds=best.i_ds,
        min_input_power=best.input_power,
        points=points,
    )
