"""Closed-loop runner: stream semantics, steady-state cross-check against the
algebraic solution, determinism, telemetry schema and decimation."""

from __future__ import annotations

import dataclasses
import math

import pytest

from fluxseek import InductionMachine, SimulationDivergedError
from fluxseek.harness import (
    CSV_HEADER,
    Scenario,
    constant_scenario,
    csv_bytes,
    profile_value,
    run_scenario,
    simulate,
)
from fluxseek.harness.runner import TelemetryRecord, format_record

GOLDEN_HEADER = (
    "time,omega_ref,omega_r,i_ds_cmd,i_qs_cmd,i_ds,i_qs,psi_dr,torque,"
    "load_torque,loss_cu_s,loss_cu_r,loss_fe,loss_conv,p_in,p_out,"
    "efficiency,mode"
)


def test_csv_header_is_frozen():
    assert CSV_HEADER == GOLDEN_HEADER


def test_zero_duration_scenario_yields_empty_stream(config):
    scenario = constant_scenario("empty", 0.0, 1e-4, 150.0, 6.0)
    assert run_scenario(scenario, config) == []


def test_profile_value_lookup():
    profile = ((0.0, 1.0), (2.0, 5.0), (4.0, -1.0))
    assert profile_value(profile, 0.0) == 1.0
    assert profile_value(profile, 1.999) == 1.0
    assert profile_value(profile, 2.0) == 5.0
    assert profile_value(profile, 100.0) == -1.0


def test_scenario_validation():
    with pytest.raises(ValueError):
        constant_scenario("bad", -1.0, 1e-4, 150.0, 6.0)
    with pytest.raises(ValueError):
        constant_scenario("bad", 1.0, 0.0, 150.0, 6.0)
    with pytest.raises(ValueError):
        Scenario("bad", 1.0, 1e-4, ((1.0, 150.0),), ((0.0, 6.0),))
    with pytest.raises(ValueError):
        Scenario("bad", 1.0, 1e-4, ((0.0, 150.0), (0.5, 100.0), (0.5, 90.0)), ((0.0, 6.0),))


def test_steady_state_matches_algebraic_solution(config):
    # Independent oracle: at steady state the developed torque covers load
    # plus friction, currents equal their commands, flux equals L_m * i_ds.
    scenario = constant_scenario(
        "steady", 3.0, 1e-4, 150.0, 6.0, flc_enabled=False, compensator_enabled=False
    )
    result = simulate(scenario, config)
    last = result.records[-1]

    p = config.machine
    machine = InductionMachine(p)
    t_e = 6.0 + p.friction * 150.0
    psi = p.rated_flux
    i_qs = t_e / (p.torque_constant_flux * psi)
    i_ds = p.rated_excitation_current
    omega_e = p.pole_pairs * 150.0 + machine.slip_frequency(i_qs, psi)
    copper_s = 1.5 * p.stator_resistance * (i_ds**2 + i_qs**2)
    copper_r = 1.5 * p.rotor_resistance * (p.magnetizing_inductance / p.rotor_inductance) ** 2 * i_qs**2
    iron = (p.iron_loss_eddy_coeff * omega_e**2 + p.iron_loss_hysteresis_coeff * omega_e) * psi**2
    conv = p.converter_fixed_loss + p.converter_resistive_coeff * (i_ds**2 + i_qs**2)
    expected_p_in = t_e * 150.0 + copper_s + copper_r + iron + conv

    assert last.p_in == pytest.approx(expected_p_in, rel=1e-3)
    assert last.omega_r == pytest.approx(150.0, rel=1e-3)
    assert last.psi_dr == pytest.approx(psi, rel=1e-3)


def test_repeated_runs_are_byte_identical(config):
    scenario = constant_scenario("det", 1.0, 1e-4, 150.0, 6.0)
    a = csv_bytes(simulate(scenario, config).records)
    b = csv_bytes(simulate(scenario, config).records)
    assert a == b
    assert a.split(b"\n", 1)[0] == GOLDEN_HEADER.encode()


def test_decimation_controls_record_count(config):
    scenario = constant_scenario("decim", 0.1, 1e-4, 150.0, 6.0)
    default = simulate(scenario, config)
    per_step = simulate(scenario, config, decimation=1)
    assert len(default.records) == 100  # every 10th of 1000 steps
    assert len(per_step.records) == 1000
    # the decimated stream is a subsequence of the per-step stream
    assert default.records[0] == per_step.records[9]


def test_energy_bookkeeping_exact_on_telemetry(config):
    # Input power is shaft power plus total loss by definition; recomputing
    # the sum leaves at most one addition's rounding.
    scenario = constant_scenario("energy", 0.5, 1e-4, 150.0, 6.0)
    for r in simulate(scenario, config).records:
        losses = r.loss_stator_copper + r.loss_rotor_copper + r.loss_iron + r.loss_converter
        assert abs(r.p_in - r.torque * r.omega_r - losses) <= 1e-12 * max(1.0, abs(r.p_in))


def test_mode_transitions_recorded(config):
    result = simulate(config.scenario("short-demo"), config)
    modes = {r.mode for r in result.records}
    assert modes == {"transient", "search"}


def test_flc_disabled_never_searches(config):
    scenario = constant_scenario(
        "off", 1.0, 1e-4, 150.0, 6.0, flc_enabled=False, compensator_enabled=False
    )
    result = simulate(scenario, config)
    assert {r.mode for r in result.records} == {"transient"}
    rated = config.machine.rated_excitation_current
    assert all(r.i_ds_cmd == rated for r in result.records)


def test_rated_flux_command_held_during_transient_mode(config):
    result = simulate(config.scenario("short-demo"), config, decimation=1)
    rated = config.machine.rated_excitation_current
    for r in result.records:
        if r.mode == "transient":
            assert r.i_ds_cmd == rated


def test_profile_steps_are_honored(config):
    scenario = Scenario(
        name="steps",
        duration=1.0,
        dt=1e-4,
        speed_reference=((0.0, 100.0), (0.5, 120.0)),
        load_torque=((0.0, 6.0), (0.25, 9.0)),
    )
    records = run_scenario(scenario, config)
    assert profile_value(scenario.speed_reference, 0.4) == 100.0
    by_time = {round(r.time, 4): r for r in records}
    assert by_time[0.25].load_torque == 6.0 or by_time[0.2501].load_torque == 9.0
    assert by_time[0.4].omega_ref == 100.0
    assert by_time[0.6].omega_ref == 120.0
    assert by_time[0.3].load_torque == 9.0


def test_divergence_reports_step_index(config):
    # A step far beyond the current-lag stability limit blows up the lag
    # states; the runner must abort with the failing step index.
    scenario = constant_scenario("blowup", 10.0, 0.1, 150.0, 6.0, flc_enabled=False)
    with pytest.raises(SimulationDivergedError) as err:
        simulate(scenario, config)
    assert err.value.step_index >= 0


def test_efficiency_absent_when_input_power_nonpositive():
    record = TelemetryRecord(
        time=0.0, omega_ref=0.0, omega_r=0.0, i_ds_cmd=0.5, i_qs_cmd=0.0,
        i_ds=0.5, i_qs=0.0, psi_dr=0.07, torque=0.0, load_torque=0.0,
        loss_stator_copper=0.0, loss_rotor_copper=0.0, loss_iron=0.0,
        loss_converter=0.0, p_in=-5.0, p_out=0.0, efficiency=None,
        mode="transient",
    )
    line = format_record(record)
    fields = line.split(",")
    assert fields[-2] == ""  # efficiency column empty
    assert fields[-1] == "transient"


def test_simulation_result_metadata(config):
    result = simulate(config.scenario("short-demo"), config)
    assert result.scenario_name == "short-demo"
    assert result.sample_count >= 1
    assert result.final_mode in ("transient", "search")
    assert math.isfinite(result.final_i_ds_cmd)
