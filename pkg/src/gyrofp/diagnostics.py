"""Monitored quantities and runtime checks of the a-priori estimates."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .fields import TORUS_AREA, SpectralField2D
from .grid import WeightKind
from .norms import gradient_norm, l2m_l4_norm, sobolev_norm, weighted_l2_norm
from .solver import PhysicalParams, SolverState, solver_context, potential
from .spectral import compute_density

__all__ = [
    "DiagnosticsRecord",
    "RECORD_FIELDS",
    "INEQUALITIES",
    "compute_record",
    "MonitorCheck",
    "MonitorReport",
    "check_apriori",
    "DEFAULT_SLACK",
]

DEFAULT_SLACK = 1e-6
INEQUALITIES = ("u_norm", "m_norm", "l4_norm", "rho_reg")
RHO_REG_CONSTANT = 2.0 ** 0.25 * math.pi


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    norm_2u: float
    norm_2m: float
    norm_l2m_l4: float
    grad_norm_2m: float
    rho_h_half: float
    phi_h1: float
    min_f: float
    boundary_mass_fraction: float

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


RECORD_FIELDS = tuple(f.name for f in fields(DiagnosticsRecord))


def compute_record(state: SolverState) -> DiagnosticsRecord:
    f = state.f
    ctx = solver_context(state.params)
    vals = f.values()
    rho = compute_density(f, ctx.table)
    fluct = SpectralField2D(rho.coeffs, f.K, zero_mean=True)
    # share of |f| carried by the outermost cell
    abs_profile = np.mean(np.abs(vals), axis=(0, 1)) * f.grid.weights
    total = float(np.sum(abs_profile))
    return DiagnosticsRecord(
        t=float(state.time),
        mass=f.mass(),
        norm_2u=weighted_l2_norm(f, WeightKind.U),
        norm_2m=weighted_l2_norm(f, WeightKind.M),
        norm_l2m_l4=l2m_l4_norm(f, vals),
        grad_norm_2m=gradient_norm(f, WeightKind.M),
        rho_h_half=sobolev_norm(fluct, 0.5),
        phi_h1=sobolev_norm(potential(state), 1.0),
        min_f=float(vals.min()),
        boundary_mass_fraction=float(abs_profile[-1] / total) if total > 0 else 0.0,
    )


@dataclass(frozen=True)
class MonitorCheck:
    """One inequality at one record; ``margin = (bound - value) / bound``."""

    name: str
    t: float
    value: float
    bound: float
    margin: float
    passed: bool


def _margin(value: float, bound: float) -> float:
    if not (math.isfinite(value) and math.isfinite(bound)):
        return -math.inf
    if bound > 0:
        return (bound - value) / bound
    return 0.0 if value <= 0 else -math.inf


@dataclass(frozen=True)
class MonitorReport:
    checks: tuple[MonitorCheck, ...]
    slack: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst(self) -> MonitorCheck | None:
        return min(self.checks, key=lambda c: c.margin, default=None)

    @property
    def worst_margin(self) -> float:
        w = self.worst
        return math.inf if w is None else w.margin

    def by_name(self, name: str) -> list[MonitorCheck]:
        return [c for c in self.checks if c.name == name]

    def failures(self) -> list[MonitorCheck]:
        return [c for c in self.checks if not c.passed]

    def verdicts(self) -> tuple[tuple[str, float, bool], ...]:
        return tuple((c.name, c.t, c.passed) for c in self.checks)

    def summary(self) -> str:
        lines = []
        names = dict.fromkeys(c.name for c in self.checks)
        for name in names:
            group = self.by_name(name)
            # record 0 is equality by construction; report the first informative margin
            later = [c for c in group if c.t > 0] or group
            worst = min(later, key=lambda c: c.margin)
            status = "PASS" if all(c.passed for c in group) else "FAIL"
            lines.append(
                f"{status} {name:8s} records={len(group)} worst margin={worst.margin:.3e} at t={worst.t:.6g}"
            )
        return "\n".join(lines)


def _energy_factor(beta: float, t: float) -> float:
    # (exp(2 beta t) - 1) / beta, read as 2t when beta = 0
    return 2.0 * t if beta == 0 else math.expm1(2.0 * beta * t) / beta


def check_apriori(
    series,
    params: PhysicalParams,
    slack: float = DEFAULT_SLACK,
    enabled=INEQUALITIES,
) -> MonitorReport:
    """Evaluate the enabled estimates at every record against record 0."""
    series = list(series)
    if not series:
        raise ValueError("empty series")
    unknown = set(enabled) - set(INEQUALITIES)
    if unknown:
        raise ValueError(f"unknown monitors {sorted(unknown)}")
    first = series[0]
    if first.t != 0.0:
        raise ValueError("record 0 must be at t = 0")
    nu, beta = params.nu, params.beta
    checks = []
    for rec in series:
        t = rec.t
        candidates = {
            "u_norm": (rec.norm_2u, math.exp(beta * t) * first.norm_2u),
            "m_norm": (
                rec.norm_2m ** 2,
                first.norm_2m ** 2 + (2 * nu + beta) * _energy_factor(beta, t) * first.norm_2u ** 2,
            ),
            "l4_norm": (rec.norm_l2m_l4, math.exp((beta + 2 * nu) * t) * first.norm_l2m_l4),
            "rho_reg": (rec.rho_h_half, RHO_REG_CONSTANT * rec.norm_2m / math.sqrt(TORUS_AREA)),
        }
        for name in INEQUALITIES:
            if name not in enabled:
                continue
            value, bound = candidates[name]
            margin = _margin(value, bound)
            checks.append(MonitorCheck(name, t, value, bound, margin, margin >= -slack))
    return MonitorReport(tuple(checks), slack)
