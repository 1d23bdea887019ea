"""Discrete-event Monte Carlo cross-check of the closed-form cost model.

The simulator replays the system one bidding window at a time: a window
either closes with a full batch before max_time (dispatch n_required
units, charge the dispatch and transport costs) or runs the full window
length (charge the failure penalty). Holding cost accrues on the current
inventory level for the duration of every window. When a dispatch drains
the level to or below zero the cycle ends, the reorder cost is charged
and the level returns to the policy quantity. The long-run cost rate is
estimated as total cycle cost over total cycle time, with a delta-method
confidence interval for that ratio.

Determinism contract: results are a pure function of (auction, costs,
policy, config, stream). Random numbers come from
numpy.random.default_rng(SeedSequence(seed, spawn_key=(stream,))) and are
drawn in fixed-size batches whose size depends only on the sampler and
n_required, so repeated runs consume identical draw sequences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Literal

import numpy as np

from .costmodel import CostParams, Policy
from .errors import ConfigError, ParameterError
from .stochastics import AuctionParams, TD_MODES, TdMode

ShortfallRule = Literal["reset_to_q", "carry_shortfall"]
DurationSampler = Literal["interarrival_sum", "erlang"]

SHORTFALL_RULES: tuple[str, ...] = ("reset_to_q", "carry_shortfall")
DURATION_SAMPLERS: tuple[str, ...] = ("interarrival_sum", "erlang")

_MAX_SEED = 2**64
# Draw batches target ~2M exponentials so per-chunk memory stays modest.
_CHUNK_BUDGET = 1 << 21
_ERLANG_CHUNK = 1 << 14
# Two-sided 95% normal quantile.
_Z_95 = 1.959963984540054


@dataclass(frozen=True)
class SimulationConfig:
    """Run-length, seeding and behavioural switches for one simulation.

    num_cycles: replenishment cycles to complete (the run length).
    seed: root seed; each replication stream is derived from it.
    shortfall_rule: what happens when the final dispatch of a cycle
        oversells the remaining stock. "reset_to_q" restarts the next
        cycle at the full policy quantity (backorders absorbed by the
        replenishment); "carry_shortfall" subtracts the oversold units
        from the next cycle's starting stock and requires
        quantity >= n_required so the restart level stays positive.
    duration_sampler: "interarrival_sum" draws n_required exponential
        gaps per window and sums them; "erlang" draws the window length
        in one gamma variate. Statistically identical, different draw
        streams.
    td_mode_for_comparison: which analytic dispatch-time mode downstream
        reports should compare against by default.
    """

    num_cycles: int
    seed: int = 0
    shortfall_rule: ShortfallRule = "reset_to_q"
    duration_sampler: DurationSampler = "interarrival_sum"
    td_mode_for_comparison: TdMode = "consistent"

    def __post_init__(self) -> None:
        if isinstance(self.num_cycles, bool) or not isinstance(self.num_cycles, int):
            raise ParameterError("num_cycles must be an integer")
        if self.num_cycles < 1:
            raise ParameterError(f"num_cycles must be >= 1, got {self.num_cycles}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ParameterError("seed must be an integer")
        if not 0 <= self.seed < _MAX_SEED:
            raise ParameterError(f"seed must satisfy 0 <= seed < 2**64, got {self.seed}")
        if self.shortfall_rule not in SHORTFALL_RULES:
            raise ParameterError(
                f"shortfall_rule must be one of {SHORTFALL_RULES}, got {self.shortfall_rule!r}"
            )
        if self.duration_sampler not in DURATION_SAMPLERS:
            raise ParameterError(
                f"duration_sampler must be one of {DURATION_SAMPLERS}, got {self.duration_sampler!r}"
            )
        if self.td_mode_for_comparison not in TD_MODES:
            raise ParameterError(
                f"td_mode_for_comparison must be one of {TD_MODES}, got {self.td_mode_for_comparison!r}"
            )


@dataclass(frozen=True)
class SimulationCounts:
    """Event tallies: failures + dispatches == auctions, cycles == num_cycles."""

    auctions: int
    failures: int
    dispatches: int
    cycles: int


@dataclass(frozen=True)
class SimulationResult:
    """Point estimates with standard errors from one simulation stream.

    Standard-error fields are 0.0 when fewer than two observations exist.
    long_run_cost equals total_cost / total_time exactly (same division),
    and long_run_cost_halfwidth is the 95% delta-method half-width for
    that ratio estimator.
    """

    p_hat: float
    p_hat_se: float
    mean_dispatch_interval: float
    mean_dispatch_interval_se: float
    mean_cycle_length: float
    mean_cycle_length_se: float
    mean_cycle_cost: float
    mean_cycle_cost_se: float
    total_cost: float
    total_time: float
    long_run_cost: float
    long_run_cost_halfwidth: float
    counts: SimulationCounts


def rng_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator number ``index`` derived from a root seed.

    Uses numpy.random.SeedSequence(seed, spawn_key=(index,)), so streams
    for different indices never overlap and the derivation is stable.
    """
    if index < 0:
        raise ParameterError(f"stream index must be >= 0, got {index}")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _draw_durations(
    rng: np.random.Generator, sampler: DurationSampler, n_required: int, arrival_rate: float
) -> list[float]:
    if sampler == "interarrival_sum":
        chunk = max(256, _CHUNK_BUDGET // n_required)
        gaps = rng.standard_exponential((chunk, n_required))
        return (gaps.sum(axis=1) / arrival_rate).tolist()
    return rng.gamma(shape=float(n_required), scale=1.0 / arrival_rate, size=_ERLANG_CHUNK).tolist()


def _mean_se(values: "np.ndarray") -> tuple[float, float]:
    n = values.size
    mean = float(values.mean()) if n else 0.0
    if n < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(n))


def _ratio_halfwidth(costs_arr: "np.ndarray", lengths_arr: "np.ndarray", ratio: float) -> float:
    n = costs_arr.size
    if n < 2:
        return 0.0
    mean_len = float(lengths_arr.mean())
    var_cost = float(costs_arr.var(ddof=1))
    var_len = float(lengths_arr.var(ddof=1))
    cov = float(((costs_arr - costs_arr.mean()) * (lengths_arr - mean_len)).sum() / (n - 1))
    var_ratio = (var_cost - 2.0 * ratio * cov + ratio * ratio * var_len) / (n * mean_len * mean_len)
    return _Z_95 * math.sqrt(max(var_ratio, 0.0))


class _EventWriter:
    def __init__(self, target: str | Path | IO[str]):
        if hasattr(target, "write"):
            self._fh: IO[str] = target  # type: ignore[assignment]
            self._owned = False
        else:
            self._fh = open(target, "w", encoding="utf-8")
            self._owned = True

    def write(self, auction: int, start: float, duration: float, outcome: str, level_after: float) -> None:
        record = {
            "auction": auction,
            "start": start,
            "duration": duration,
            "outcome": outcome,
            "level_after": level_after,
        }
        self._fh.write(json.dumps(record, separators=(",", ":")) + "\n")

    def close(self) -> None:
        if self._owned:
            self._fh.close()


def simulate(
    auction: AuctionParams,
    costs: CostParams,
    policy: Policy,
    config: SimulationConfig,
    *,
    stream: int = 0,
    event_log: str | Path | IO[str] | None = None,
) -> SimulationResult:
    """Simulate ``config.num_cycles`` replenishment cycles on one stream.

    Requires a finite bidding window (an unbounded window never fails and
    needs no simulation) and, under "carry_shortfall", a policy quantity
    of at least n_required. When event_log is given (path or open text
    file), one JSON line is written per bidding window with keys
    auction, start, duration, outcome and level_after; level_after is the
    stock after any dispatch and replenishment triggered by that window.
    """
    if auction.unbounded:
        raise ConfigError("simulation requires a finite max_time")
    if config.shortfall_rule == "carry_shortfall" and policy.quantity < auction.n_required:
        raise ConfigError(
            "carry_shortfall requires quantity >= n_required so the restart level stays positive"
        )
    rng = rng_stream(config.seed, stream)
    n_required = auction.n_required
    max_time = auction.max_time
    dispatch_charge = costs.dispatch_cost + costs.unit_transport_cost * n_required
    reset = config.shortfall_rule == "reset_to_q"

    writer = _EventWriter(event_log) if event_log is not None else None
    cycle_costs: list[float] = []
    cycle_lengths: list[float] = []
    intervals: list[float] = []
    auctions = 0
    failures = 0
    dispatches = 0
    clock = 0.0
    last_dispatch = 0.0
    cycle_start = 0.0
    cycle_cost = 0.0
    level = policy.quantity
    done = False

    try:
        while not done:
            durations = _draw_durations(rng, config.duration_sampler, n_required, auction.arrival_rate)
            for duration in durations:
                auctions += 1
                start = clock
                if duration < max_time:
                    clock += duration
                    cycle_cost += costs.holding_rate * level * duration + dispatch_charge
                    dispatches += 1
                    intervals.append(clock - last_dispatch)
                    last_dispatch = clock
                    remaining = level - n_required
                    if remaining <= 0.0:
                        cycle_cost += costs.reorder_cost
                        cycle_costs.append(cycle_cost)
                        cycle_lengths.append(clock - cycle_start)
                        level = policy.quantity if reset else policy.quantity + remaining
                        cycle_start = clock
                        cycle_cost = 0.0
                        if len(cycle_costs) >= config.num_cycles:
                            done = True
                    else:
                        level = remaining
                    outcome = "success"
                    logged_duration = duration
                else:
                    clock += max_time
                    cycle_cost += costs.holding_rate * level * max_time + costs.failure_penalty
                    failures += 1
                    outcome = "failure"
                    logged_duration = max_time
                if writer is not None:
                    writer.write(auctions, start, logged_duration, outcome, level)
                if done:
                    break
    finally:
        if writer is not None:
            writer.close()

    costs_arr = np.asarray(cycle_costs)
    lengths_arr = np.asarray(cycle_lengths)
    intervals_arr = np.asarray(intervals)
    total_cost = math.fsum(cycle_costs)
    total_time = math.fsum(cycle_lengths)
    long_run = total_cost / total_time
    p_hat = dispatches / auctions
    p_se = math.sqrt(p_hat * (1.0 - p_hat) / auctions) if auctions > 1 else 0.0
    mean_interval, interval_se = _mean_se(intervals_arr)
    mean_length, length_se = _mean_se(lengths_arr)
    mean_cost, cost_se = _mean_se(costs_arr)
    return SimulationResult(
        p_hat=p_hat,
        p_hat_se=p_se,
        mean_dispatch_interval=mean_interval,
        mean_dispatch_interval_se=interval_se,
        mean_cycle_length=mean_length,
        mean_cycle_length_se=length_se,
        mean_cycle_cost=mean_cost,
        mean_cycle_cost_se=cost_se,
        total_cost=total_cost,
        total_time=total_time,
        long_run_cost=long_run,
        long_run_cost_halfwidth=_ratio_halfwidth(costs_arr, lengths_arr, long_run),
        counts=SimulationCounts(
            auctions=auctions, failures=failures, dispatches=dispatches, cycles=len(cycle_costs)
        ),
    )


def replicate(
    auction: AuctionParams,
    costs: CostParams,
    policy: Policy,
    config: SimulationConfig,
    num_replications: int,
) -> list[SimulationResult]:
    """Run independent replications on streams 0 .. num_replications - 1.

    Replication r always uses stream index r, so any prefix of the list is
    the same regardless of how many replications were requested.
    """
    if isinstance(num_replications, bool) or not isinstance(num_replications, int):
        raise ParameterError("num_replications must be an integer")
    if num_replications < 1:
        raise ParameterError(f"num_replications must be >= 1, got {num_replications}")
    return [
        simulate(auction, costs, policy, config, stream=index)
        for index in range(num_replications)
    ]
