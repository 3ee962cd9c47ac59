"""Efficiency report: structure, rendering, CSV schema, and the
non-convergence flag."""

from __future__ import annotations

import io

import pytest

from fluxseek.errors import FluxseekError
from fluxseek.harness import efficiency_table, render_text, steady_window_mean
from fluxseek.harness.report import REPORT_CSV_HEADER, write_report_csv


@pytest.fixture(scope="module")
def small_report(config):
    # One load fraction with short horizons: structure only, trends are
    # covered by the acceptance suite on full-length runs.
    return efficiency_table(
        (0.25,), config.machine.rated_speed, config,
        off_duration=1.5, on_duration=2.0, window=0.4,
    )


def test_report_row_structure(small_report):
    assert len(small_report.flc_off) == 1
    assert len(small_report.flc_on) == 1
    row = small_report.flc_off[0]
    assert row.load_torque == pytest.approx(6.0)
    assert row.input_power > row.output_power > 0.0
    assert 0.0 < row.efficiency < 1.0
    assert row.converged and row.samples_to_convergence is None


def test_short_run_flags_non_convergence(small_report):
    # Two seconds is not enough for the search to converge; the row must be
    # flagged rather than silently truncated.
    row = small_report.flc_on[0]
    assert not row.converged
    assert row.samples_to_convergence is None
    assert row.input_power > 0.0


def test_render_text_layout(small_report):
    text = render_text(small_report)
    assert "Without efficiency controller" in text
    assert "With efficiency controller" in text
    assert "load torque (N m)" in text
    assert "efficiency (%)" in text
    assert " NO" in text  # the non-converged flag is visible


def test_report_csv_schema(small_report):
    buffer = io.StringIO()
    write_report_csv(small_report, buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == REPORT_CSV_HEADER
    assert len(lines) == 3  # header + one off row + one on row
    assert lines[1].startswith("flc_off,")
    assert lines[2].startswith("flc_on,")
    assert lines[2].split(",")[6] == "false"


def test_steady_window_mean_requires_records():
    with pytest.raises(FluxseekError):
        steady_window_mean((), 1.0)
