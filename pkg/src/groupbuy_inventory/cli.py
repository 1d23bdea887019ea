"""Command-line interface: optimize, simulate, sweep and validate.

Configuration comes from an optional flat ``key = value`` file (``#``
starts a comment) plus per-key override flags; a flag always wins over
the file. All reports are plain deterministic text on stdout, or written
to the file named by ``path`` / ``--out``.

Exit codes: 0 success, 1 validation checks failed, 2 configuration
error, 3 numeric domain error, 4 sweep finished with failed cells.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .costmodel import (
    A_MODES,
    CostParams,
    Policy,
    best_integer_quantity,
    cost_rate_terms,
    cycle_cost_breakdown,
    eoq_limit,
    long_run_average_cost,
    optimal_cost,
    optimal_quantity,
)
from .errors import ConfigError, DomainError, NumericsError, ParameterError
from .simulator import (
    DURATION_SAMPLERS,
    SHORTFALL_RULES,
    SimulationConfig,
    SimulationResult,
    replicate,
    simulate,
)
from .stochastics import (
    AuctionParams,
    AuctionStatistics,
    TD_MODES,
    auction_statistics,
)
from .sweep import REPORT_FORMATS, SweepSpec, emit_report, run_sweep

_Z_95 = 1.959963984540054

_CHOICES = {
    "td_mode": TD_MODES,
    "a_mode": A_MODES,
    "shortfall_rule": SHORTFALL_RULES,
    "duration_sampler": DURATION_SAMPLERS,
    "format": REPORT_FORMATS,
}

_INT_KEYS = ("n_required", "num_cycles", "replications", "seed")
_FLOAT_KEYS = (
    "max_time",
    "arrival_rate",
    "dispatch_cost",
    "transport_cost_per_unit",
    "holding_rate",
    "penalty_cost",
    "reorder_cost",
    "quantity",
)
_LIST_INT_KEYS = ("n_values",)
_LIST_FLOAT_KEYS = ("t_values", "lambda_values")
_BOOL_KEYS = ("include_simulation",)
_STR_KEYS = ("path",)

_ALL_KEYS = (
    _INT_KEYS
    + _FLOAT_KEYS
    + tuple(_CHOICES)
    + _LIST_INT_KEYS
    + _LIST_FLOAT_KEYS
    + _BOOL_KEYS
    + _STR_KEYS
)


@dataclass
class RunConfig:
    """Fully parsed run configuration; None means the key was not given."""

    n_required: int | None = None
    max_time: float | None = None
    arrival_rate: float | None = None
    dispatch_cost: float | None = None
    transport_cost_per_unit: float | None = None
    holding_rate: float | None = None
    penalty_cost: float | None = None
    reorder_cost: float | None = None
    quantity: float | None = None
    td_mode: str = "paper"
    a_mode: str = "approx"
    shortfall_rule: str = "reset_to_q"
    duration_sampler: str = "interarrival_sum"
    num_cycles: int = 20000
    replications: int = 1
    seed: int = 0
    format: str = "markdown"
    path: str | None = None
    n_values: tuple[int, ...] | None = None
    t_values: tuple[float, ...] | None = None
    lambda_values: tuple[float, ...] | None = None
    include_simulation: bool = False


def parse_config_text(text: str) -> dict[str, str]:
    """Parse a flat ``key = value`` config document into raw strings.

    Blank lines are skipped and ``#`` starts a comment. Unknown keys,
    missing '=' and empty values are configuration errors.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for key {key!r}")
        values[key] = value
    return values


def _to_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _to_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if math.isnan(value):
        raise ConfigError(f"{key}: must not be NaN")
    return value


def _to_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _convert(key: str, raw: str) -> object:
    if key in _INT_KEYS:
        return _to_int(key, raw)
    if key in _FLOAT_KEYS:
        return _to_float(key, raw)
    if key in _CHOICES:
        if raw not in _CHOICES[key]:
            raise ConfigError(f"{key}: must be one of {_CHOICES[key]}, got {raw!r}")
        return raw
    if key in _LIST_INT_KEYS:
        return tuple(_to_int(key, part.strip()) for part in raw.split(","))
    if key in _LIST_FLOAT_KEYS:
        return tuple(_to_float(key, part.strip()) for part in raw.split(","))
    if key in _BOOL_KEYS:
        return _to_bool(key, raw)
    return raw


def _validate_ranges(cfg: RunConfig) -> None:
    if cfg.n_required is not None and cfg.n_required < 1:
        raise ConfigError(f"n_required: must be >= 1, got {cfg.n_required}")
    if cfg.max_time is not None and not cfg.max_time > 0.0:
        raise ConfigError(f"max_time: must be > 0 (inf allowed), got {cfg.max_time}")
    if cfg.arrival_rate is not None and not (
        math.isfinite(cfg.arrival_rate) and cfg.arrival_rate > 0.0
    ):
        raise ConfigError(f"arrival_rate: must be finite and > 0, got {cfg.arrival_rate}")
    for key in ("dispatch_cost", "transport_cost_per_unit", "holding_rate",
                "penalty_cost", "reorder_cost"):
        value = getattr(cfg, key)
        if value is not None and not (math.isfinite(value) and value >= 0.0):
            raise ConfigError(f"{key}: must be finite and >= 0, got {value}")
    if cfg.quantity is not None and not (math.isfinite(cfg.quantity) and cfg.quantity > 0.0):
        raise ConfigError(f"quantity: must be finite and > 0, got {cfg.quantity}")
    if cfg.num_cycles < 1:
        raise ConfigError(f"num_cycles: must be >= 1, got {cfg.num_cycles}")
    if cfg.replications < 1:
        raise ConfigError(f"replications: must be >= 1, got {cfg.replications}")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError(f"seed: must satisfy 0 <= seed < 2**64, got {cfg.seed}")
    for key in ("n_values", "t_values", "lambda_values"):
        values = getattr(cfg, key)
        if values is not None and len(values) == 0:
            raise ConfigError(f"{key}: must be non-empty")
    if cfg.n_values is not None and any(n < 1 for n in cfg.n_values):
        raise ConfigError("n_values: every entry must be >= 1")


def load_run_config(config_path: str | None, overrides: dict[str, str]) -> RunConfig:
    """Merge a config file with flag overrides into a validated RunConfig."""
    raw: dict[str, str] = {}
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        raw.update(parse_config_text(path.read_text(encoding="utf-8")))
    raw.update(overrides)
    cfg = RunConfig()
    for key, value in raw.items():
        setattr(cfg, key, _convert(key, value))
    _validate_ranges(cfg)
    return cfg


def _require(cfg: RunConfig, *keys: str) -> None:
    missing = [key for key in keys if getattr(cfg, key) is None]
    if missing:
        raise ConfigError(f"missing required config key(s): {', '.join(missing)}")


def _auction_from(cfg: RunConfig) -> AuctionParams:
    _require(cfg, "n_required", "max_time", "arrival_rate")
    return AuctionParams(
        n_required=cfg.n_required,
        max_time=cfg.max_time,
        arrival_rate=cfg.arrival_rate,
    )


def _costs_from(cfg: RunConfig) -> CostParams:
    _require(cfg, "dispatch_cost", "transport_cost_per_unit", "holding_rate",
             "penalty_cost", "reorder_cost")
    return CostParams(
        dispatch_cost=cfg.dispatch_cost,
        unit_transport_cost=cfg.transport_cost_per_unit,
        holding_rate=cfg.holding_rate,
        failure_penalty=cfg.penalty_cost,
        reorder_cost=cfg.reorder_cost,
    )


def _require_optimizable(costs: CostParams) -> None:
    if costs.holding_rate <= 0.0:
        raise ConfigError("holding_rate: must be > 0 to optimize the quantity")
    if costs.reorder_cost <= 0.0:
        raise ConfigError("reorder_cost: must be > 0 to optimize the quantity")


def _scenario_lines(auction: AuctionParams, costs: CostParams) -> list[str]:
    return [
        f"  auction: n_required={auction.n_required} max_time={auction.max_time:g} "
        f"arrival_rate={auction.arrival_rate:g}",
        f"  costs: dispatch={costs.dispatch_cost:g} transport/unit={costs.unit_transport_cost:g} "
        f"holding={costs.holding_rate:g} penalty={costs.failure_penalty:g} "
        f"reorder={costs.reorder_cost:g}",
    ]


def _stat_line(label: str, value: float) -> str:
    return f"  {label:<28} {value:>12.4f}   ({value!r})"


def _fmt_z(z: float) -> str:
    return f"{z:+.2f}" if math.isfinite(z) else "n/a"


def cmd_optimize(cfg: RunConfig) -> tuple[str, int]:
    """Closed-form report: auction statistics, Q*, cost breakdown."""
    auction = _auction_from(cfg)
    costs = _costs_from(cfg)
    _require_optimizable(costs)
    stats = auction_statistics(auction)
    n = auction.n_required
    q_star = optimal_quantity(stats, costs, n, cfg.td_mode)
    q_int = best_integer_quantity(stats, costs, n, cfg.td_mode)
    cost_star = optimal_cost(stats, costs, n, cfg.td_mode)
    cost_int = long_run_average_cost(stats, costs, Policy(float(q_int)), n, cfg.td_mode, "approx")
    policy = Policy(q_star)
    terms = cost_rate_terms(stats, costs, policy, n, cfg.td_mode)
    breakdown = cycle_cost_breakdown(stats, costs, policy, n, cfg.td_mode, cfg.a_mode)

    lines = ["replenishment optimization report"]
    lines += _scenario_lines(auction, costs)
    lines.append(f"  modes: td_mode={cfg.td_mode} a_mode={cfg.a_mode}")
    lines.append("")
    lines.append("auction statistics")
    lines.append(_stat_line("success probability", stats.p_success))
    lines.append(_stat_line("truncated mean duration", stats.e_min_duration))
    lines.append(_stat_line("conditional mean duration", stats.e_cond_duration))
    lines.append(_stat_line("expected failures", stats.expected_failures))
    lines.append(_stat_line("dispatch time (paper)", stats.dispatch_time_paper))
    lines.append(_stat_line("dispatch time (consistent)", stats.dispatch_time_consistent))
    lines.append("")
    lines.append(f"optimal policy (td_mode={cfg.td_mode})")
    lines.append(_stat_line("optimal quantity", q_star))
    lines.append(f"  {'best integer quantity':<28} {q_int:>12d}")
    lines.append(_stat_line("optimal cost rate", cost_star))
    lines.append(_stat_line("cost rate at best integer", cost_int))
    lines.append(_stat_line("eoq limit (window -> inf)", eoq_limit(costs, auction.arrival_rate)))
    lines.append("")
    lines.append("cost rate terms at the optimum (per time unit, approx dispatches)")
    for name, value in terms.items():
        lines.append(f"  {name:<20} {value:>14.6f}")
    lines.append("")
    lines.append(f"cycle view at the optimum (a_mode={cfg.a_mode})")
    lines.append(f"  {'cycle length':<20} {breakdown.cycle_length:>14.6f}")
    lines.append(f"  {'cycle cost':<20} {breakdown.cycle_total:>14.6f}")
    lines.append(f"  {'holding':<20} {breakdown.holding:>14.6f}")
    lines.append(f"  {'dispatching':<20} {breakdown.dispatching:>14.6f}")
    lines.append(f"  {'transport':<20} {breakdown.transport:>14.6f}")
    lines.append(f"  {'penalty':<20} {breakdown.penalty:>14.6f}")
    lines.append(f"  {'reorder':<20} {breakdown.reorder:>14.6f}")
    return "\n".join(lines) + "\n", 0


def _result_block(title: str, result: SimulationResult) -> list[str]:
    counts = result.counts
    return [
        title,
        f"  p_hat                      {result.p_hat:>12.6f}   (se {result.p_hat_se:.3e})",
        f"  mean dispatch interval     {result.mean_dispatch_interval:>12.6f}   "
        f"(se {result.mean_dispatch_interval_se:.3e})",
        f"  mean cycle length          {result.mean_cycle_length:>12.6f}   "
        f"(se {result.mean_cycle_length_se:.3e})",
        f"  mean cycle cost            {result.mean_cycle_cost:>12.6f}   "
        f"(se {result.mean_cycle_cost_se:.3e})",
        f"  long-run cost rate         {result.long_run_cost:>12.6f}   "
        f"(95% halfwidth {result.long_run_cost_halfwidth:.3e})",
        f"  counts: auctions={counts.auctions} failures={counts.failures} "
        f"dispatches={counts.dispatches} cycles={counts.cycles}",
    ]


def cmd_simulate(cfg: RunConfig) -> tuple[str, int]:
    """Monte Carlo run plus side-by-side analytic comparison."""
    auction = _auction_from(cfg)
    costs = _costs_from(cfg)
    _require(cfg, "quantity")
    if auction.unbounded:
        raise ConfigError("max_time: must be finite for simulation")
    policy = Policy(cfg.quantity)
    sim_config = SimulationConfig(
        num_cycles=cfg.num_cycles,
        seed=cfg.seed,
        shortfall_rule=cfg.shortfall_rule,
        duration_sampler=cfg.duration_sampler,
        td_mode_for_comparison="consistent",
    )
    results = replicate(auction, costs, policy, sim_config, cfg.replications)
    stats = auction_statistics(auction)
    n = auction.n_required

    lines = ["simulation report"]
    lines += _scenario_lines(auction, costs)
    lines.append(
        f"  policy: quantity={policy.quantity:g} shortfall_rule={cfg.shortfall_rule}"
    )
    lines.append(
        f"  run: cycles={cfg.num_cycles} seed={cfg.seed} sampler={cfg.duration_sampler} "
        f"replications={cfg.replications}"
    )
    lines.append("")
    for index, result in enumerate(results):
        lines += _result_block(f"stream {index}", result)
        lines.append("")

    primary = results[0]
    se_p = primary.p_hat_se
    se_interval = primary.mean_dispatch_interval_se
    se_cost = primary.long_run_cost_halfwidth / _Z_95
    lines.append("analytic comparison, stream 0 (z in standard errors)")
    z = (primary.p_hat - stats.p_success) / se_p if se_p > 0 else math.nan
    lines.append(f"  p_success                  {stats.p_success:>12.6f}   z={_fmt_z(z)}")
    for mode, value in (
        ("paper", stats.dispatch_time_paper),
        ("consistent", stats.dispatch_time_consistent),
    ):
        z = (primary.mean_dispatch_interval - value) / se_interval if se_interval > 0 else math.nan
        lines.append(f"  dispatch time td={mode:<11}{value:>12.6f}   z={_fmt_z(z)}")
    for td_mode in TD_MODES:
        for a_mode in ("exact", "approx"):
            value = long_run_average_cost(stats, costs, policy, n, td_mode, a_mode)
            z = (primary.long_run_cost - value) / se_cost if se_cost > 0 else math.nan
            lines.append(
                f"  cost rate td={td_mode:<11} a_mode={a_mode:<7}{value:>12.6f}   z={_fmt_z(z)}"
            )
    if cfg.replications > 1:
        costs_across = [r.long_run_cost for r in results]
        mean = math.fsum(costs_across) / len(costs_across)
        var = math.fsum((c - mean) ** 2 for c in costs_across) / (len(costs_across) - 1)
        lines.append("")
        lines.append(
            f"replication summary: long-run cost mean {mean:.6f} sd {math.sqrt(var):.6f} "
            f"({len(costs_across)} streams)"
        )
    return "\n".join(lines) + "\n", 0


def cmd_sweep(cfg: RunConfig) -> tuple[str, int]:
    """Grid evaluation; exit 4 when any cell failed."""
    costs = _costs_from(cfg)
    _require_optimizable(costs)
    _require(cfg, "n_values", "t_values", "lambda_values")
    simulation = None
    if cfg.include_simulation:
        simulation = SimulationConfig(
            num_cycles=cfg.num_cycles,
            seed=cfg.seed,
            shortfall_rule=cfg.shortfall_rule,
            duration_sampler=cfg.duration_sampler,
        )
    spec = SweepSpec(
        n_values=cfg.n_values,
        t_values=cfg.t_values,
        lambda_values=cfg.lambda_values,
        costs=costs,
        td_mode=cfg.td_mode,
        simulation=simulation,
    )
    rows = run_sweep(spec)
    text = emit_report(rows, cfg.format)
    code = 4 if any(row.error is not None for row in rows) else 0
    return text, code


# Frozen reference values for the validation suite: the base scenario and
# the 3x3 (n_required, max_time) grid at arrival rate 14 with costs
# dispatch=40, transport/unit=4, holding=0.02, penalty=10, reorder=300.
_REFERENCE_AUCTION = AuctionParams(n_required=100, max_time=7.0, arrival_rate=14.0)
_REFERENCE_COSTS = CostParams(
    dispatch_cost=40.0,
    unit_transport_cost=4.0,
    holding_rate=0.02,
    failure_penalty=10.0,
    reorder_cost=300.0,
)
_REFERENCE_BASE = {
    "p_success": 0.4333,
    "truncated_mean": 6.7829,
    "dispatch_time": 15.9376,
    "q_star": 433.8597,
    "q_star_integer": 434,
}
_REFERENCE_RATE = 14.0
_REFERENCE_P = {
    (80, 6.0): 0.6834, (80, 7.0): 0.9723, (80, 8.0): 0.9994,
    (100, 6.0): 0.0484, (100, 7.0): 0.4333, (100, 8.0): 0.8826,
    (120, 6.0): 0.0001, (120, 7.0): 0.0172, (120, 8.0): 0.2368,
}
_REFERENCE_TD = {
    (80, 6.0): 8.3539, (80, 7.0): 5.9060, (80, 8.0): 5.7192,
    (100, 6.0): 123.94, (100, 7.0): 15.938, (100, 8.0): 8.1614,
    (120, 6.0): 46989.0, (120, 7.0): 406.81, (120, 8.0): 33.681,
}
_REFERENCE_Q = {
    (80, 6.0): 536, (80, 7.0): 637, (80, 8.0): 648,
    (100, 6.0): 156, (100, 7.0): 434, (100, 8.0): 606,
    (120, 6.0): 9, (120, 7.0): 94, (120, 8.0): 327,
}
# Informational only: the reference cost-rate grid is not reproducible
# from the reference inputs (see cmd_validate), so deltas are reported
# without a pass/fail judgement.
_REFERENCE_COST = {
    (80, 6.0): 53.9714, (80, 7.0): 72.8599, (80, 8.0): 74.9544,
    (100, 6.0): 9.1673, (100, 7.0): 37.4780, (100, 8.0): 65.9756,
    (120, 6.0): 3.0524, (120, 7.0): 5.7391, (120, 8.0): 23.8377,
}
# This low-probability cell amplifies roundoff in its displayed reference
# values, so it gets looser comparison bounds.
_SENSITIVE_CELL = (120, 6.0)


def _reference_grid_stats() -> dict[tuple[int, float], AuctionStatistics]:
    return {
        cell: auction_statistics(
            AuctionParams(n_required=cell[0], max_time=cell[1], arrival_rate=_REFERENCE_RATE)
        )
        for cell in _REFERENCE_P
    }


def cmd_validate(cfg: RunConfig) -> tuple[str, int]:
    """Fidelity suite against frozen references plus simulation cross-checks.

    The closed-form checks always run on the frozen reference scenario.
    The simulation cross-checks run on the configured scenario with the
    reset_to_q shortfall rule (the analytic model describes that rule),
    at the configured quantity or, when absent, the best integer optimum.
    """
    auction = _auction_from(cfg)
    costs = _costs_from(cfg)
    _require_optimizable(costs)
    if auction.unbounded:
        raise ConfigError("max_time: must be finite for validation")

    checks: list[tuple[str, str]] = []

    def check(passed: bool, text: str) -> None:
        checks.append(("PASS" if passed else "FAIL", text))

    def info(text: str) -> None:
        checks.append(("INFO", text))

    ref_stats = auction_statistics(_REFERENCE_AUCTION)
    ref = _REFERENCE_BASE
    check(
        abs(ref_stats.p_success - ref["p_success"]) <= 5e-5,
        f"base success probability {ref_stats.p_success:.6f} vs {ref['p_success']} (tol 5e-05)",
    )
    check(
        abs(ref_stats.e_min_duration - ref["truncated_mean"]) <= 1e-3,
        f"base truncated mean duration {ref_stats.e_min_duration:.6f} "
        f"vs {ref['truncated_mean']} (tol 1e-03)",
    )
    check(
        abs(ref_stats.dispatch_time_paper - ref["dispatch_time"]) <= 1e-3,
        f"base dispatch time {ref_stats.dispatch_time_paper:.6f} "
        f"vs {ref['dispatch_time']} (tol 1e-03)",
    )
    ref_q_star = optimal_quantity(ref_stats, _REFERENCE_COSTS, 100, "paper")
    check(
        abs(ref_q_star - ref["q_star"]) <= 1e-3,
        f"base optimal quantity {ref_q_star:.6f} vs {ref['q_star']} (tol 1e-03)",
    )
    ref_q_int = best_integer_quantity(ref_stats, _REFERENCE_COSTS, 100, "paper")
    check(
        ref_q_int == ref["q_star_integer"],
        f"base integer quantity {ref_q_int} vs {ref['q_star_integer']}",
    )

    grid_stats = _reference_grid_stats()
    worst_p = max(
        abs(grid_stats[cell].p_success - expected) for cell, expected in _REFERENCE_P.items()
    )
    check(worst_p <= 5e-5, f"grid success probability: max abs delta {worst_p:.2e} (tol 5e-05, 9 cells)")

    td_ok = True
    worst_td = 0.0
    for cell, expected in _REFERENCE_TD.items():
        rel = abs(grid_stats[cell].dispatch_time_paper - expected) / expected
        limit = 0.05 if cell == _SENSITIVE_CELL else 0.01
        worst_td = max(worst_td, rel)
        td_ok = td_ok and rel <= limit
    check(td_ok, f"grid dispatch time: max rel delta {worst_td:.2e} (tol 1e-02, loose cell 5e-02)")

    q_ok = True
    mismatches: list[str] = []
    for cell, expected in _REFERENCE_Q.items():
        computed = best_integer_quantity(grid_stats[cell], _REFERENCE_COSTS, cell[0], "paper")
        slack = 1 if cell == _SENSITIVE_CELL else 0
        if abs(computed - expected) > slack:
            q_ok = False
            mismatches.append(f"n={cell[0]} t={cell[1]:g}: {computed} vs {expected}")
    check(
        q_ok,
        "grid integer quantity: all 9 cells match"
        if q_ok
        else "grid integer quantity mismatches: " + "; ".join(mismatches),
    )

    worst_consistency = 0.0
    for cell in _REFERENCE_P:
        stats_cell = grid_stats[cell]
        n_cell = cell[0]
        q_star_cell = optimal_quantity(stats_cell, _REFERENCE_COSTS, n_cell, "paper")
        closed = optimal_cost(stats_cell, _REFERENCE_COSTS, n_cell, "paper")
        direct = long_run_average_cost(
            stats_cell, _REFERENCE_COSTS, Policy(q_star_cell), n_cell, "paper", "approx"
        )
        worst_consistency = max(worst_consistency, abs(closed - direct) / closed)
    check(
        worst_consistency <= 1e-9,
        f"closed-form vs direct cost at Q*: max rel delta {worst_consistency:.2e} (tol 1e-09)",
    )

    scan_ok = True
    for cell in _REFERENCE_P:
        stats_cell = grid_stats[cell]
        n_cell = cell[0]
        best = best_integer_quantity(stats_cell, _REFERENCE_COSTS, n_cell, "paper")
        best_cost = long_run_average_cost(
            stats_cell, _REFERENCE_COSTS, Policy(float(best)), n_cell, "paper", "approx"
        )
        for candidate in range(max(1, best - 50), best + 51):
            cost_candidate = long_run_average_cost(
                stats_cell, _REFERENCE_COSTS, Policy(float(candidate)), n_cell, "paper", "approx"
            )
            if cost_candidate < best_cost * (1.0 - 1e-12):
                scan_ok = False
    check(scan_ok, "integer scan: no cheaper quantity within +/-50 of the optimum (9 cells)")

    long_window = AuctionParams(n_required=100, max_time=1e5, arrival_rate=_REFERENCE_RATE)
    q_long = optimal_quantity(auction_statistics(long_window), _REFERENCE_COSTS, 100, "paper")
    eoq = eoq_limit(_REFERENCE_COSTS, _REFERENCE_RATE)
    eoq_rel = abs(q_long - eoq) / eoq
    check(eoq_rel <= 1e-3, f"eoq limit: rel delta {eoq_rel:.2e} at max_time=1e5 (tol 1e-03)")

    stats = auction_statistics(auction)
    n = auction.n_required
    if cfg.quantity is not None:
        quantity = cfg.quantity
        quantity_origin = "config"
    else:
        quantity = float(best_integer_quantity(stats, costs, n, cfg.td_mode))
        quantity_origin = "best integer optimum"
    policy = Policy(quantity)
    sim_config = SimulationConfig(
        num_cycles=cfg.num_cycles,
        seed=cfg.seed,
        shortfall_rule="reset_to_q",
        duration_sampler=cfg.duration_sampler,
    )
    result = simulate(auction, costs, policy, sim_config)

    se_p = result.p_hat_se
    z_p = (result.p_hat - stats.p_success) / se_p if se_p > 0 else math.nan
    check(
        math.isfinite(z_p) and abs(z_p) <= 4.0,
        f"simulated success rate: z={_fmt_z(z_p)} (|z| <= 4)",
    )
    se_interval = result.mean_dispatch_interval_se
    z_interval = (
        (result.mean_dispatch_interval - stats.dispatch_time_consistent) / se_interval
        if se_interval > 0
        else math.nan
    )
    check(
        math.isfinite(z_interval) and abs(z_interval) <= 4.0,
        f"simulated dispatch interval vs consistent mode: z={_fmt_z(z_interval)} (|z| <= 4)",
    )
    analytic_cost = long_run_average_cost(stats, costs, policy, n, "consistent", "exact")
    se_cost = result.long_run_cost_halfwidth / _Z_95
    z_cost = (result.long_run_cost - analytic_cost) / se_cost if se_cost > 0 else math.nan
    check(
        math.isfinite(z_cost) and abs(z_cost) <= 4.0,
        f"simulated cost rate vs consistent/exact analytic: z={_fmt_z(z_cost)} (|z| <= 4)",
    )
    td_gap = stats.dispatch_time_paper - stats.dispatch_time_consistent
    if se_interval > 0 and td_gap > 6.0 * se_interval:
        z_paper = (result.mean_dispatch_interval - stats.dispatch_time_paper) / se_interval
        check(
            z_paper < -3.0,
            f"dispatch-interval adjudication: z vs paper mode {_fmt_z(z_paper)} < -3 "
            "(simulation sides with the consistent mode)",
        )
    else:
        info("dispatch-time modes statistically indistinguishable at this run length")

    info(
        f"duration semantics on configured scenario: truncated {stats.e_min_duration:.6f} vs "
        f"conditional {stats.e_cond_duration:.6f}; dispatch time paper "
        f"{stats.dispatch_time_paper:.6f} vs consistent {stats.dispatch_time_consistent:.6f}"
    )
    cost_deltas = []
    for cell in sorted(_REFERENCE_COST):
        stats_cell = grid_stats[cell]
        computed = optimal_cost(stats_cell, _REFERENCE_COSTS, cell[0], "paper")
        cost_deltas.append(f"n={cell[0]} t={cell[1]:g}: {computed - _REFERENCE_COST[cell]:+.4f}")
    info("reference cost-rate grid deltas (computed - reference): " + "; ".join(cost_deltas))

    passed = sum(1 for status, _ in checks if status == "PASS")
    failed = sum(1 for status, _ in checks if status == "FAIL")
    informational = sum(1 for status, _ in checks if status == "INFO")

    lines = ["validation report"]
    lines += _scenario_lines(auction, costs)
    lines.append(
        f"  simulation: cycles={cfg.num_cycles} seed={cfg.seed} quantity={quantity:g} "
        f"({quantity_origin}) sampler={cfg.duration_sampler} shortfall_rule=reset_to_q"
    )
    lines.append("")
    for status, text in checks:
        lines.append(f"[{status}] {text}")
    lines.append("")
    lines.append(f"summary: {passed} passed, {failed} failed, {informational} informational")
    return "\n".join(lines) + "\n", 0 if failed == 0 else 1


_COMMANDS = {
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}

_FLAG_KEYS = [key for key in _ALL_KEYS if key != "path"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupbuy-inventory",
        description="Replenishment analytics for inventory feeding group-buying auctions.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "optimize": "closed-form statistics, optimal quantity and cost breakdown",
        "simulate": "Monte Carlo run with analytic side-by-side comparison",
        "sweep": "evaluate a parameter grid and emit csv/json/markdown",
        "validate": "fidelity suite against frozen reference values",
    }
    for name, help_text in descriptions.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("config", nargs="?", default=None,
                         help="path to a flat key = value config file")
        for key in _FLAG_KEYS:
            sub.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None, metavar="V")
        sub.add_argument("--cycles", dest="num_cycles", default=None, metavar="V",
                         help="alias for --num-cycles")
        sub.add_argument("--out", dest="path", default=None, metavar="FILE",
                         help="write the report to FILE instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key in _ALL_KEYS and value is not None
    }
    try:
        cfg = load_run_config(args.config, overrides)
        text, code = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, NumericsError, ParameterError) as exc:
        print(f"numeric domain error: {exc}", file=sys.stderr)
        return 3
    if cfg.path is not None:
        Path(cfg.path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
