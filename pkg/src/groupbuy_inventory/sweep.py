"""Parameter sweeps over auction designs, with CSV/JSON/markdown reports.

A sweep evaluates the closed-form pipeline (success probability, dispatch
time, optimal quantity, optimal cost rate) on the cartesian grid of batch
sizes, window lengths and arrival rates, optionally cross-checking each
cell with a simulation run at the real-valued optimum. Cells whose
evaluation raises a package error are kept in the output with an error
marker instead of aborting the sweep.

Reports are deterministic byte-for-byte for equal inputs. Numbers are
rendered with 6 significant digits (Python's round-half-even %g), so a
CSV report parsed back agrees with the JSON report exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .costmodel import (
    CostParams,
    Policy,
    best_integer_quantity,
    optimal_cost,
    optimal_quantity,
)
from .errors import GroupBuyError, ParameterError
from .simulator import SimulationConfig, simulate
from .stochastics import AuctionParams, TdMode, auction_statistics, check_td_mode, select_dispatch_time

REPORT_FORMATS: tuple[str, ...] = ("csv", "json", "markdown")

CSV_COLUMNS: tuple[str, ...] = (
    "n",
    "t",
    "lambda",
    "p_success",
    "dispatch_time",
    "q_star_real",
    "q_star_integer",
    "optimal_cost",
    "sim_cost",
    "sim_halfwidth",
    "delta",
)


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition for one sweep.

    n_values, t_values, lambda_values: grid axes (batch size, window
        length, arrival rate). Deduplicated and sorted ascending before
        evaluation.
    costs: cost coefficients shared by every cell.
    td_mode: dispatch-time mode used for the optimization in every cell.
    simulation: when given, each successful cell also runs one simulation
        at the real-valued optimal quantity. Cells with a tiny success
        probability simulate slowly; leave this off for wide exploratory
        grids.
    """

    n_values: Sequence[int]
    t_values: Sequence[float]
    lambda_values: Sequence[float]
    costs: CostParams
    td_mode: TdMode = "paper"
    simulation: SimulationConfig | None = None

    def __post_init__(self) -> None:
        for name in ("n_values", "t_values", "lambda_values"):
            if len(getattr(self, name)) == 0:
                raise ParameterError(f"{name} must be non-empty")
        check_td_mode(self.td_mode)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid cell.

    The numeric fields are None either because the cell failed (error
    holds the reason) or, for the sim_* fields, because the sweep ran
    without simulation. delta is sim_cost - optimal_cost.
    """

    n: int
    t: float
    arrival_rate: float
    p_success: float | None
    dispatch_time: float | None
    q_star_real: float | None
    q_star_integer: int | None
    optimal_cost: float | None
    sim_cost: float | None
    sim_halfwidth: float | None
    delta: float | None
    error: str | None = None


def _sorted_unique(values: Sequence[float]) -> list[float]:
    return sorted(set(values))


def _evaluate_cell(n: int, t: float, rate: float, spec: SweepSpec) -> SweepRow:
    try:
        params = AuctionParams(n_required=n, max_time=t, arrival_rate=rate)
        stats = auction_statistics(params)
        q_star = optimal_quantity(stats, spec.costs, n, spec.td_mode)
        q_int = best_integer_quantity(stats, spec.costs, n, spec.td_mode)
        cost_star = optimal_cost(stats, spec.costs, n, spec.td_mode)
        sim_cost = sim_halfwidth = delta = None
        if spec.simulation is not None:
            result = simulate(params, spec.costs, Policy(q_star), spec.simulation)
            sim_cost = result.long_run_cost
            sim_halfwidth = result.long_run_cost_halfwidth
            delta = sim_cost - cost_star
        return SweepRow(
            n=n,
            t=t,
            arrival_rate=rate,
            p_success=stats.p_success,
            dispatch_time=select_dispatch_time(stats, spec.td_mode),
            q_star_real=q_star,
            q_star_integer=q_int,
            optimal_cost=cost_star,
            sim_cost=sim_cost,
            sim_halfwidth=sim_halfwidth,
            delta=delta,
        )
    except GroupBuyError as exc:
        return SweepRow(
            n=n,
            t=t,
            arrival_rate=rate,
            p_success=None,
            dispatch_time=None,
            q_star_real=None,
            q_star_integer=None,
            optimal_cost=None,
            sim_cost=None,
            sim_halfwidth=None,
            delta=None,
            error=f"{type(exc).__name__}: {exc}",
        )


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate every grid cell in lexicographic (n, t, lambda) order.

    Axes are deduplicated and sorted ascending first, so the row order is
    a deterministic function of the axis sets. Always returns one row per
    cell; failed cells carry an error marker instead of numbers.
    """
    n_axis: list[int] = []
    for value in _sorted_unique(spec.n_values):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParameterError(f"n_values entries must be integers, got {value!r}")
        n_axis.append(value)
    t_axis = [float(v) for v in _sorted_unique(spec.t_values)]
    rate_axis = [float(v) for v in _sorted_unique(spec.lambda_values)]
    return [
        _evaluate_cell(n, t, rate, spec)
        for n in n_axis
        for t in t_axis
        for rate in rate_axis
    ]


def _format_number(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def _rounded(value: float | int | None) -> float | int | None:
    # JSON carries the same 6-significant-digit values the CSV prints.
    if value is None or isinstance(value, int):
        return value
    if not math.isfinite(value):
        return value
    return float(f"{value:.6g}")


def _row_cells(row: SweepRow) -> tuple[float | int | None, ...]:
    return (
        row.n,
        row.t,
        row.arrival_rate,
        row.p_success,
        row.dispatch_time,
        row.q_star_real,
        row.q_star_integer,
        row.optimal_cost,
        row.sim_cost,
        row.sim_halfwidth,
        row.delta,
    )


def _emit_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_number(cell) for cell in _row_cells(row)))
    return "\n".join(lines) + "\n"


def _emit_json(rows: Sequence[SweepRow]) -> str:
    payload = [
        {name: _rounded(cell) for name, cell in zip(CSV_COLUMNS, _row_cells(row))}
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def _grid_table(
    group: Sequence[SweepRow],
    n_axis: Sequence[int],
    t_axis: Sequence[float],
    value_of: Callable[[SweepRow], float | int | None],
) -> list[str]:
    by_cell = {(row.n, row.t): row for row in group}
    lines = ["| n \\ t | " + " | ".join(_format_number(t) for t in t_axis) + " |"]
    lines.append("| --- |" + " --- |" * len(t_axis))
    for n in n_axis:
        cells = []
        for t in t_axis:
            row = by_cell.get((n, t))
            if row is None:
                cells.append("")
            elif row.error is not None:
                cells.append("ERR")
            else:
                cells.append(_format_number(value_of(row)))
        lines.append(f"| {n} | " + " | ".join(cells) + " |")
    return lines


def _emit_markdown(rows: Sequence[SweepRow]) -> str:
    lines = ["# Replenishment policy sweep", ""]
    for rate in sorted({row.arrival_rate for row in rows}):
        group = [row for row in rows if row.arrival_rate == rate]
        n_axis = sorted({row.n for row in group})
        t_axis = sorted({row.t for row in group})
        lines.append(f"## arrival_rate = {_format_number(rate)}")
        lines.append("")
        sections: tuple[tuple[str, Callable[[SweepRow], float | int | None]], ...] = (
            ("success probability", lambda row: row.p_success),
            ("expected dispatch time", lambda row: row.dispatch_time),
            ("optimal quantity (integer)", lambda row: row.q_star_integer),
            ("optimal cost rate", lambda row: row.optimal_cost),
        )
        for title, value_of in sections:
            lines.append(f"### {title}")
            lines.append("")
            lines.extend(_grid_table(group, n_axis, t_axis, value_of))
            lines.append("")
        sim_rows = [row for row in group if row.sim_cost is not None]
        if sim_rows:
            lines.append("### simulation cross-check")
            lines.append("")
            lines.append("| n | t | sim_cost | sim_halfwidth | delta |")
            lines.append("| --- | --- | --- | --- | --- |")
            for row in sim_rows:
                lines.append(
                    f"| {row.n} | {_format_number(row.t)} | {_format_number(row.sim_cost)} "
                    f"| {_format_number(row.sim_halfwidth)} | {_format_number(row.delta)} |"
                )
            lines.append("")
        errors = [row for row in group if row.error is not None]
        if errors:
            lines.append("### errors")
            lines.append("")
            for row in errors:
                lines.append(
                    f"- n={row.n} t={_format_number(row.t)}: {row.error}"
                )
            lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def emit_report(rows: Sequence[SweepRow], format: str = "csv") -> str:
    """Render sweep rows as one of "csv", "json" or "markdown".

    CSV: fixed 11-column header, one line per row, empty cells for missing
    values. JSON: an array of objects with exactly the CSV column names.
    Markdown: per-arrival-rate grid tables with "ERR" in failed cells plus
    an error list. Output is byte-deterministic for equal rows.
    """
    if len(rows) == 0:
        raise ParameterError("rows must be non-empty")
    if format == "csv":
        return _emit_csv(rows)
    if format == "json":
        return _emit_json(rows)
    if format == "markdown":
        return _emit_markdown(rows)
    raise ParameterError(f"format must be one of {REPORT_FORMATS}, got {format!r}")
