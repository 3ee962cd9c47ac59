"""Part-load efficiency report: paired runs with and without the efficiency
controller at each load fraction, reduced to input power, output power and
efficiency columns."""

from __future__ import annotations

import io
from dataclasses import dataclass

from ..errors import FluxseekError
from .config import DriveConfig
from .runner import SimulationResult, TelemetryRecord, simulate
from .scenario import constant_scenario

DEFAULT_LOAD_FRACTIONS = (0.25, 1.0 / 3.0, 0.5, 0.75)

REPORT_CSV_HEADER = (
    "table,load_fraction,load_torque,input_power_w,output_power_w,"
    "efficiency,converged,samples_to_convergence"
)


@dataclass(frozen=True)
class EfficiencyRow:
    load_fraction: float
    load_torque: float        # N m
    input_power: float        # W, steady-window mean
    output_power: float       # W, steady-window mean
    efficiency: float         # output / input
    converged: bool           # search reached its convergence flag (on-rows)
    samples_to_convergence: int | None


@dataclass(frozen=True)
class EfficiencyReport:
    speed: float
    flc_off: tuple[EfficiencyRow, ...]
    flc_on: tuple[EfficiencyRow, ...]


def steady_window_mean(
    records: tuple[TelemetryRecord, ...], window: float
) -> tuple[float, float]:
    """Mean (p_in, p_out) over the trailing ``window`` seconds of telemetry."""
    if not records:
        raise FluxseekError("no telemetry records to average")
    t_end = records[-1].time
    tail = [r for r in records if r.time > t_end - window]
    n = len(tail)
    return sum(r.p_in for r in tail) / n, sum(r.p_out for r in tail) / n


def _row(
    result: SimulationResult,
    load_fraction: float,
    load_torque: float,
    window: float,
    search_run: bool,
) -> EfficiencyRow:
    p_in, p_out = steady_window_mean(result.records, window)
    return EfficiencyRow(
        load_fraction=load_fraction,
        load_torque=load_torque,
        input_power=p_in,
        output_power=p_out,
        efficiency=p_out / p_in,
        converged=result.converged if search_run else True,
        samples_to_convergence=result.samples_to_convergence if search_run else None,
    )


def efficiency_table(
    load_fractions,
    speed: float,
    config: DriveConfig,
    *,
    off_duration: float = 4.0,
    on_duration: float = 14.0,
    dt: float = 1e-4,
    window: float = 1.0,
) -> EfficiencyReport:
    """Run the paired scenarios at each load fraction of rated torque.

    Rows of a non-converged search run are flagged (``converged`` False), not
    silently truncated; their steady-window numbers are still reported.
    """
    off_rows = []
    on_rows = []
    for fraction in load_fractions:
        torque = fraction * config.machine.rated_torque
        off = simulate(
            constant_scenario(
                f"flc-off-{fraction:g}", off_duration, dt, speed, torque,
                flc_enabled=False, compensator_enabled=False,
            ),
            config,
        )
        on = simulate(
            constant_scenario(
                f"flc-on-{fraction:g}", on_duration, dt, speed, torque,
                flc_enabled=True, compensator_enabled=True,
            ),
            config,
        )
        off_rows.append(_row(off, fraction, torque, window, search_run=False))
        on_rows.append(_row(on, fraction, torque, window, search_run=True))
    return EfficiencyReport(speed=speed, flc_off=tuple(off_rows), flc_on=tuple(on_rows))


def _render_block(title: str, rows: tuple[EfficiencyRow, ...], show_flag: bool) -> list[str]:
    lines = [title, "-" * len(title)]
    header = f"{'load torque (N m)':>18}  {'input power (kW)':>17}  {'output power (kW)':>18}  {'efficiency (%)':>15}"
    if show_flag:
        header += f"  {'converged':>9}"
    lines.append(header)
    for row in rows:
        line = (
            f"{row.load_torque:>18.2f}  {row.input_power / 1e3:>17.3f}  "
            f"{row.output_power / 1e3:>18.3f}  {100.0 * row.efficiency:>15.1f}"
        )
        if show_flag:
            line += f"  {'yes' if row.converged else 'NO':>9}"
        lines.append(line)
    return lines


def render_text(report: EfficiencyReport) -> str:
    lines = [f"Part-load efficiency at {report.speed:g} rad/s"]
    lines.append("")
    lines.extend(_render_block("Without efficiency controller (rated flux)", report.flc_off, False))
    lines.append("")
    lines.extend(_render_block("With efficiency controller", report.flc_on, True))
    return "\n".join(lines) + "\n"


def write_report_csv(report: EfficiencyReport, target) -> None:
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", encoding="utf-8", newline="") as handle:
            write_report_csv(report, handle)
        return
    assert hasattr(target, "write")
    target.write(REPORT_CSV_HEADER + "\n")
    for tag, rows in (("flc_off", report.flc_off), ("flc_on", report.flc_on)):
        for row in rows:
            samples = "" if row.samples_to_convergence is None else str(row.samples_to_convergence)
            target.write(
                f"{tag},{row.load_fraction!r},{row.load_torque!r},"
                f"{row.input_power!r},{row.output_power!r},{row.efficiency!r},"
                f"{str(row.converged).lower()},{samples}\n"
            )


def report_csv_bytes(report: EfficiencyReport) -> bytes:
    buffer = io.StringIO()
    write_report_csv(report, buffer)
    return buffer.getvalue().encode("utf-8")
