"""Run orchestration: stepping to ``t_end`` with records and monitors, and the
two-trajectory stability experiment."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig, cosine_field, initial_state
from .diagnostics import DiagnosticsRecord, MonitorReport, check_apriori, compute_record
from .grid import WeightKind
from .norms import weighted_l2_norm
from .solver import SolverState, cfl_dt, step

__all__ = ["RunResult", "run", "evolve", "StabilityTrace", "StabilityReport", "stability_experiment"]

log = logging.getLogger(__name__)

_TIME_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class RunResult:
    """Outcome of :func:`run`. ``status`` is ``completed``, ``bound_violation`` or ``blow_up``."""

    state: SolverState
    series: list[DiagnosticsRecord]
    report: MonitorReport
    status: str
    last_valid: SolverState

    def __iter__(self):
        yield self.state
        yield self.series

    @property
    def ok(self) -> bool:
        return self.status == "completed" and self.report.passed


def _finite(state: SolverState) -> bool:
    return bool(np.all(np.isfinite(state.f.modal)))


def _record_times(t_end: float, interval: float) -> list[float]:
    count = int(math.floor(t_end / interval + 1e-9))
    times = [i * interval for i in range(1, count + 1)]
    if not times or t_end - times[-1] > _TIME_EPS * max(1.0, t_end):
        times.append(t_end)
    return [t for t in times if t > 0]


def evolve(state: SolverState, t_target: float) -> SolverState:
    """Step with the largest admissible ``dt`` until ``t_target`` is reached exactly."""
    while t_target - state.time > _TIME_EPS * max(1.0, t_target):
        dt = min(cfl_dt(state), t_target - state.time)
        state = step(state, dt)
        if not _finite(state):
            raise FloatingPointError(f"non-finite values at t={state.time:.6g}")
    return replace(state, time=t_target)


def run(config: RunConfig, state: SolverState | None = None) -> RunResult:
    """Integrate ``config`` (or ``state``) to ``t_end``, recording every ``record_interval``."""
    state = initial_state(config) if state is None else state
    series = [compute_record(state)]
    status = "completed"
    last_valid = state
    for target in _record_times(config.t_end, config.record_interval):
        while target - state.time > _TIME_EPS * max(1.0, target):
            dt = min(cfl_dt(state), target - state.time)
            new = step(state, dt)
            if not _finite(new):
                status = "blow_up"
                log.error("non-finite values after step %d at t=%.6g", new.step_count, new.time)
                break
            state = new
        if status == "blow_up":
            break
        state = replace(state, time=target)
        last_valid = state
        series.append(compute_record(state))
        if not series[-1].is_finite():
            status = "blow_up"
            break
        partial = check_apriori([series[0], series[-1]], config.params, config.slack, config.monitors)
        if not partial.passed and config.abort_on_violation:
            status = "bound_violation"
            log.error("a-priori bound violated at t=%.6g:\n%s", target, partial.summary())
            break
    report = check_apriori(series, config.params, config.slack, config.monitors)
    return RunResult(state, series, report, status, last_valid)


@dataclass(frozen=True)
class StabilityTrace:
    delta: float
    times: tuple[float, ...]
    distance: tuple[float, ...]

    @property
    def max_distance(self) -> float:
        return max(self.distance)


@dataclass(frozen=True)
class StabilityReport:
    traces: tuple[StabilityTrace, ...]
    monotone: bool
    early_ratios: tuple[float, ...]
    linear: bool

    def summary(self) -> str:
        lines = [f"{'delta':>10s} {'max s(t)':>14s} {'s(t_1)':>14s}"]
        for tr in self.traces:
            early = tr.distance[1] if len(tr.distance) > 1 else tr.distance[0]
            lines.append(f"{tr.delta:10.3e} {tr.max_distance:14.6e} {early:14.6e}")
        lines.append(f"monotone in delta: {'yes' if self.monotone else 'NO'}")
        lines.append(
            "early-time ratios / delta ratios: "
            + ", ".join(f"{r:.3f}" for r in self.early_ratios)
            + f" ({'near-linear' if self.linear else 'NOT near-linear'})"
        )
        return "\n".join(lines)


def perturbation_direction(config: RunConfig, base: SolverState) -> np.ndarray:
    """Mass-neutral smooth direction with unit ``||.||_{2,m}`` (random phases from ``seed``)."""
    rng = np.random.default_rng(config.seed)
    K = config.params.K
    modes = [(1, 1), (2, 0), (0, 2), (1, -2)]
    modes = [(a, b) for a, b in modes if max(abs(a), abs(b)) <= K] or [(1, 0)]
    field = cosine_field(K, modes, [1.0] * len(modes), rng.uniform(0, 2 * np.pi, len(modes)))
    profile = base.f.mean_profile
    direction = base.f.with_modal(field.coeffs[:, :, None] * profile[None, None, :])
    return direction.modal / weighted_l2_norm(direction, WeightKind.M)


def _pair_trajectory(base: SolverState, other: SolverState, config: RunConfig):
    times = [0.0]
    dist = [weighted_l2_norm(base.f - other.f, WeightKind.M)]
    t_end = config.t_end
    while t_end - base.time > _TIME_EPS * max(1.0, t_end):
        dt = min(cfl_dt(base), cfl_dt(other), t_end - base.time)
        base, other = step(base, dt), step(other, dt)
        times.append(base.time)
        dist.append(weighted_l2_norm(base.f - other.f, WeightKind.M))
    return base, other, times, dist


def stability_experiment(config: RunConfig, deltas=None) -> StabilityReport:
    """Distance ``||f_1(t) - f_2(t)||_{2,m}`` between runs from ``f_i`` and
    ``f_i + delta ||f_i||_{2,m} p`` for each ``delta``, in lockstep."""
    deltas = tuple(config.deltas if deltas is None else deltas)
    base = initial_state(config)
    norm0 = weighted_l2_norm(base.f, WeightKind.M)
    direction = perturbation_direction(config, base)
    traces = []
    for delta in deltas:
        other = replace(base, f=base.f.with_modal(base.f.modal + delta * norm0 * direction))
        if float(other.f.values().min()) < 0:
            raise ValueError(f"perturbation delta={delta} makes the datum negative")
        _, _, times, dist = _pair_trajectory(base, other, config)
        traces.append(StabilityTrace(delta, tuple(times), tuple(dist)))
    ordered = sorted((t for t in traces if t.delta > 0), key=lambda t: -t.delta)
    maxima = [t.max_distance for t in ordered]
    monotone = all(a > b for a, b in zip(maxima, maxima[1:]))
    ratios = []
    for big, small in zip(ordered, ordered[1:]):
        idx = 1 if len(big.distance) > 1 else 0
        observed = big.distance[idx] / small.distance[idx] if small.distance[idx] > 0 else math.inf
        ratios.append(observed / (big.delta / small.delta))
    linear = all(0.5 <= r <= 2.0 for r in ratios)
    return StabilityReport(tuple(traces), monotone, tuple(ratios), linear)
