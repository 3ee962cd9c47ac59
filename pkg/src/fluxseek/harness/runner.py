"""Fixed-step closed-loop execution of one scenario.

Step order: command profiles -> speed PI -> mode supervisor / excitation
switch -> feedforward compensation -> command limiting -> coupled machine
step -> losses and power bookkeeping. Telemetry is emitted every decimation
interval. Everything is deterministic: identical scenario + config produce
byte-identical CSV output.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from ..compensator import TorqueCompensator
from ..errors import NonFiniteError, SimulationDivergedError
from ..foc import SpeedLoopState, make_drive_command, rated_flux_command, speed_pi_step
from ..machine import InductionMachine, MachineParams, MachineState
from ..optimizer import (
    DriveMode,
    SearchState,
    advance_sample_timer,
    search_sample,
    update_mode,
)
from .config import DriveConfig
from .scenario import Scenario

CSV_HEADER = (
    "time,omega_ref,omega_r,i_ds_cmd,i_qs_cmd,i_ds,i_qs,psi_dr,torque,"
    "load_torque,loss_cu_s,loss_cu_r,loss_fe,loss_conv,p_in,p_out,"
    "efficiency,mode"
)


@dataclass(frozen=True)
class TelemetryRecord:
    """One decimated integration step's signals."""

    time: float
    omega_ref: float
    omega_r: float
    i_ds_cmd: float
    i_qs_cmd: float
    i_ds: float
    i_qs: float
    psi_dr: float
    torque: float
    load_torque: float
    loss_stator_copper: float
    loss_rotor_copper: float
    loss_iron: float
    loss_converter: float
    p_in: float
    p_out: float
    efficiency: float | None  # absent unless p_in > 0
    mode: str


@dataclass(frozen=True)
class SimulationResult:
    """Records plus search bookkeeping the report generator needs."""

    scenario_name: str
    records: tuple[TelemetryRecord, ...]
    sample_count: int
    converged: bool
    samples_to_convergence: int | None
    convergence_time: float | None
    final_mode: str
    final_i_ds_cmd: float


def initial_state(params: MachineParams) -> MachineState:
    """Pre-magnetized standstill: rated flux established, shaft at rest."""
    return MachineState(
        rotor_flux=params.rated_flux,
        rotor_speed=0.0,
        i_ds=params.rated_excitation_current,
        i_qs=0.0,
        synchronous_angle=0.0,
        simulated_time=0.0,
    )


def simulate(
    scenario: Scenario, config: DriveConfig, *, decimation: int | None = None
) -> SimulationResult:
    """Run the full closed loop and collect telemetry."""
    params = config.machine
    machine = InductionMachine(params)
    settings = config.search
    ctrl = config.controller()
    dt = scenario.dt
    n_steps = round(scenario.duration / dt)
    decim = config.telemetry_decimation if decimation is None else decimation
    if decim < 1:
        raise ValueError("decimation must be >= 1")

    flc = scenario.flc_enabled
    pi = SpeedLoopState(
        kp=config.speed_kp,
        ki=config.speed_ki,
        integrator=0.0,
        output_limit=params.max_torque_current,
    )
    search = SearchState()
    comp = (
        TorqueCompensator(params, config.flux_source, config.compensation_mode)
        if scenario.compensator_enabled
        else None
    )
    state = initial_state(params)
    rated_cmd = rated_flux_command(params)
    i_ds_cmd = rated_cmd

    speed_prof = scenario.speed_reference
    load_prof = scenario.load_torque
    si = li = 0
    prev_ref = speed_prof[0][1]
    prev_load = load_prof[0][1]

    records: list[TelemetryRecord] = []
    sample_count = 0
    samples_to_convergence: int | None = None
    convergence_time: float | None = None

    for k in range(n_steps):
        t = k * dt
        while si + 1 < len(speed_prof) and t >= speed_prof[si + 1][0]:
            si += 1
        while li + 1 < len(load_prof) and t >= load_prof[li + 1][0]:
            li += 1
        omega_ref = speed_prof[si][1]
        t_load = load_prof[li][1]
        command_changed = omega_ref != prev_ref or t_load != prev_load
        prev_ref = omega_ref
        prev_load = t_load

        pi, iqs_pi = speed_pi_step(pi, omega_ref, state.rotor_speed, dt)

        if flc:
            update_mode(search, settings, omega_ref - state.rotor_speed, command_changed)
            if search.mode is not DriveMode.STEADY_SEARCH:
                i_ds_cmd = rated_cmd
                if comp is not None:
                    comp.reset()
            if advance_sample_timer(search, settings, dt):
                omega_e = machine.electrical_frequency(state)
                losses = machine.compute_losses(state, omega_e)
                t_e = machine.developed_torque(state.rotor_flux, state.i_qs)
                p_d = machine.input_power(state, t_e, losses)
                comp_now = comp.output(state.rotor_flux, t) if comp is not None else 0.0
                iqs_cmd_now = make_drive_command(
                    params, omega_ref, i_ds_cmd, iqs_pi + comp_now
                ).i_qs_command
                search, i_ds_cmd = search_sample(
                    search, settings, ctrl, p_d, state.rotor_speed, i_ds_cmd, iqs_cmd_now
                )
                sample_count += 1
                if search.converged and samples_to_convergence is None:
                    samples_to_convergence = sample_count
                    convergence_time = t
                if comp is not None:
                    comp.latch(state.rotor_flux, iqs_pi, i_ds_cmd, t)
        else:
            i_ds_cmd = rated_cmd

        searching = flc and search.mode is DriveMode.STEADY_SEARCH
        comp_out = comp.output(state.rotor_flux, t) if (comp is not None and searching) else 0.0
        cmd = make_drive_command(params, omega_ref, i_ds_cmd, iqs_pi + comp_out)

        try:
            state = machine.step(state, cmd.i_ds_command, cmd.i_qs_command, t_load, dt)
        except NonFiniteError as exc:
            raise SimulationDivergedError(k, str(exc)) from exc

        if (k + 1) % decim == 0:
            omega_e = machine.electrical_frequency(state)
            losses = machine.compute_losses(state, omega_e)
            t_e = machine.developed_torque(state.rotor_flux, state.i_qs)
            p_in = machine.input_power(state, t_e, losses)
            p_out = t_load * state.rotor_speed
            records.append(
                TelemetryRecord(
                    time=state.simulated_time,
                    omega_ref=omega_ref,
                    omega_r=state.rotor_speed,
                    i_ds_cmd=cmd.i_ds_command,
                    i_qs_cmd=cmd.i_qs_command,
                    i_ds=state.i_ds,
                    i_qs=state.i_qs,
                    psi_dr=state.rotor_flux,
                    torque=t_e,
                    load_torque=t_load,
                    loss_stator_copper=losses.stator_copper,
                    loss_rotor_copper=losses.rotor_copper,
                    loss_iron=losses.iron,
                    loss_converter=losses.converter,
                    p_in=p_in,
                    p_out=p_out,
                    efficiency=p_out / p_in if p_in > 0.0 else None,
                    mode=search.mode.value if flc else DriveMode.TRANSIENT_RATED_FLUX.value,
                )
            )

    return SimulationResult(
        scenario_name=scenario.name,
        records=tuple(records),
        sample_count=sample_count,
        converged=search.converged,
        samples_to_convergence=samples_to_convergence,
        convergence_time=convergence_time,
        final_mode=search.mode.value if flc else DriveMode.TRANSIENT_RATED_FLUX.value,
        final_i_ds_cmd=i_ds_cmd,
    )


def run_scenario(scenario: Scenario, config: DriveConfig) -> list[TelemetryRecord]:
    """Telemetry records for one scenario, in emission order."""
    return list(simulate(scenario, config).records)


def format_record(record: TelemetryRecord) -> str:
    """One CSV line; floats use shortest round-trip formatting so repeated
    runs are byte-identical."""
    eff = "" if record.efficiency is None else repr(record.efficiency)
    return ",".join(
        (
            repr(record.time),
            repr(record.omega_ref),
            repr(record.omega_r),
            repr(record.i_ds_cmd),
            repr(record.i_qs_cmd),
            repr(record.i_ds),
            repr(record.i_qs),
            repr(record.psi_dr),
            repr(record.torque),
            repr(record.load_torque),
            repr(record.loss_stator_copper),
            repr(record.loss_rotor_copper),
            repr(record.loss_iron),
            repr(record.loss_converter),
            repr(record.p_in),
            repr(record.p_out),
            eff,
            record.mode,
        )
    )


def write_csv(records, target) -> None:
    """Write telemetry as CSV to a path or text file object."""
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", encoding="utf-8", newline="") as handle:
            write_csv(records, handle)
        return
    assert isinstance(target, io.TextIOBase) or hasattr(target, "write")
    target.write(CSV_HEADER + "\n")
    for record in records:
        target.write(format_record(record) + "\n")


def csv_bytes(records) -> bytes:
    buffer = io.StringIO()
    write_csv(records, buffer)
    return buffer.getvalue().encode("utf-8")
