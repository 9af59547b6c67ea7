"""Time integration of the gyro-averaged Fokker-Planck model.

    d_t f + (J0_u grad Phi)^perp . grad_x f
        = beta u d_u f + 2 beta f + nu (Lap_x f + (1/u) d_u (u d_u f))

One step is Strang-split: half a step of the ``u`` operator (trapezoidal,
tridiagonal solve per Fourier mode), a full step of E x B transport with
exact modal ``x`` diffusion (integrating-factor SSP-RK2, potential refreshed
at every stage), and another half step in ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.linalg

from .fields import GyroDistribution, SpectralField2D, from_physical, physical_size, to_physical, wavenumbers
from .grid import VelocityGrid
from .spectral import MultiplierTable, compute_density, drift_modal, solve_potential

__all__ = [
    "ConfigurationError",
    "CFLViolationError",
    "NumericalError",
    "PhysicalParams",
    "UOperator",
    "SolverState",
    "build_u_operator",
    "advection_rhs",
    "potential",
    "max_drift",
    "cfl_dt",
    "step",
    "DEFAULT_CFL",
    "DEFAULT_DT_MAX",
]

DEFAULT_CFL = 0.4
DEFAULT_DT_MAX = 0.05


class ConfigurationError(ValueError):
    """Invalid physical or numerical configuration."""


class CFLViolationError(RuntimeError):
    """A step larger than the advective stability limit was requested."""


class NumericalError(ArithmeticError):
    """Linear solve failure or non-finite values."""


@dataclass(frozen=True)
class PhysicalParams:
    """Coefficients and discretisation sizes. Defaults are the desk configuration."""

    nu: float = 0.01
    beta: float = 0.1
    T: float = 1.0
    K: int = 32
    N_u: int = 32
    u_max: float = 6.0

    def __post_init__(self):
        for name in ("nu", "beta", "T", "u_max"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise ConfigurationError(f"{name} must be finite, got {val}")
        if self.nu < 0 or self.beta < 0:
            raise ConfigurationError("nu and beta must be nonnegative")
        if self.T <= 0:
            raise ConfigurationError(f"temperature must be positive, got {self.T}")
        if self.K < 1:
            raise ConfigurationError(f"truncation K must be at least 1, got {self.K}")
        if self.N_u < 3:
            raise ConfigurationError(f"need N_u >= 3, got {self.N_u}")
        if self.u_max <= 0:
            raise ConfigurationError("u_max must be positive")

    def grid(self) -> VelocityGrid:
        return VelocityGrid(self.N_u, self.u_max)


@dataclass(frozen=True, eq=False)
class UOperator:
    """Tridiagonal discretisation of ``beta u d_u + 2 beta + nu (1/u) d_u (u d_u)``.

    Finite volumes on the cells of ``grid``: cell ``j`` has volume
    ``V_j = w_j / 2 pi`` (the ``u du`` measure) and its upper face sits at
    ``u^2 / 2 = S_j = V_0 + ... + V_j``. Diffusive flux through that face is
    ``nu u_{j+1/2} (f_{j+1} - f_j) / du`` with the face radius replaced by
    ``2 S_j / u_{j+1/2}``; the drift flux is ``beta S_j (f_j + f_{j+1})``.
    Both fluxes vanish at ``u = 0`` and at ``u_max``, so ``sum_j V_j (L f)_j = 0``.

    Rows are stored as ``(lower, diag, upper)``: ``(L f)_j = lower_j f_{j-1} +
    diag_j f_j + upper_j f_{j+1}`` with ``lower_0 = upper_{N-1} = 0``.
    """

    grid: VelocityGrid
    nu: float
    beta: float
    diffusion: tuple[np.ndarray, np.ndarray, np.ndarray]
    drift: tuple[np.ndarray, np.ndarray, np.ndarray]
    closure: tuple[str, str] = ("zero_flux", "zero_flux")
    _banded: dict = field(default_factory=dict, repr=False)

    @property
    def lower(self) -> np.ndarray:
        return self.diffusion[0] + self.drift[0]

    @property
    def diag(self) -> np.ndarray:
        return self.diffusion[1] + self.drift[1]

    @property
    def upper(self) -> np.ndarray:
        return self.diffusion[2] + self.drift[2]

    def _bands(self, part: str):
        if part == "full":
            return self.lower, self.diag, self.upper
        if part == "diffusion":
            return self.diffusion
        if part == "drift":
            return self.drift
        raise ValueError(f"unknown operator part {part!r}")

    def apply(self, values: np.ndarray, part: str = "full") -> np.ndarray:
        """Apply along the last axis."""
        lo, di, up = self._bands(part)
        out = di * values
        out[..., 1:] += lo[1:] * values[..., :-1]
        out[..., :-1] += up[:-1] * values[..., 1:]
        return out

    def matrix(self, part: str = "full") -> np.ndarray:
        lo, di, up = self._bands(part)
        return np.diag(di) + np.diag(lo[1:], -1) + np.diag(up[:-1], 1)

    def trapezoidal_step(self, values: np.ndarray, h: float) -> np.ndarray:
        """``(I - h/2 L)^{-1} (I + h/2 L) values`` along the last axis."""
        if h == 0:
            return values.copy()
        ab = self._banded.get(h)
        if ab is None:
            lo, di, up = self.lower, self.diag, self.upper
            ab = np.zeros((3, self.grid.n))
            ab[0, 1:] = -0.5 * h * up[:-1]
            ab[1] = 1.0 - 0.5 * h * di
            ab[2, :-1] = -0.5 * h * lo[1:]
            if len(self._banded) > 8:
                self._banded.clear()
            self._banded[h] = ab
        rhs = values + 0.5 * h * self.apply(values)
        shape = rhs.shape
        cols = rhs.reshape(-1, shape[-1]).T
        try:
            sol = scipy.linalg.solve_banded((1, 1), ab, cols, check_finite=False)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalError(f"u-operator solve failed: {exc}") from exc
        return np.ascontiguousarray(sol.T).reshape(shape)


def build_u_operator(grid: VelocityGrid, params: PhysicalParams) -> UOperator:
    """Assemble the ``u`` operator on ``grid`` for ``params.nu``, ``params.beta``."""
    if grid.n < 3:
        raise ConfigurationError(f"need at least 3 nodes, got {grid.n}")
    vol = grid.volumes
    S = np.cumsum(vol)[:-1]  # u^2/2 at interior faces
    u_face = (np.arange(1, grid.n)) * grid.du
    kappa = params.nu * 2.0 * S / (u_face * grid.du)
    mu = params.beta * S
    n = grid.n
    zeros = np.zeros(n)

    d_lo, d_di, d_up = zeros.copy(), zeros.copy(), zeros.copy()
    d_up[:-1] = kappa / vol[:-1]
    d_lo[1:] = kappa / vol[1:]
    d_di[:-1] -= kappa / vol[:-1]
    d_di[1:] -= kappa / vol[1:]

    b_lo, b_di, b_up = zeros.copy(), zeros.copy(), zeros.copy()
    b_up[:-1] = mu / vol[:-1]
    b_di[:-1] += mu / vol[:-1]
    b_lo[1:] = -mu / vol[1:]
    b_di[1:] -= mu / vol[1:]

    for arr in (d_lo, d_di, d_up, b_lo, b_di, b_up):
        arr.setflags(write=False)
    return UOperator(grid, params.nu, params.beta, (d_lo, d_di, d_up), (b_lo, b_di, b_up))


@dataclass(frozen=True, eq=False)
class _Context:
    grid: VelocityGrid
    table: MultiplierTable
    uop: UOperator
    k_squared: np.ndarray


@lru_cache(maxsize=16)
def solver_context(params: PhysicalParams) -> _Context:
    grid = params.grid()
    table = MultiplierTable.build(params.K, params.T, grid)
    k1, k2 = wavenumbers(params.K)
    return _Context(grid, table, build_u_operator(grid, params), k1 * k1 + k2 * k2)


@dataclass(frozen=True, eq=False)
class SolverState:
    """Distribution at ``time``. ``frozen_phi`` replaces the self-consistent potential."""

    f: GyroDistribution
    time: float
    params: PhysicalParams
    step_count: int = 0
    frozen_phi: SpectralField2D | None = None
    dt_max: float = DEFAULT_DT_MAX
    cfl: float = DEFAULT_CFL

    def __post_init__(self):
        if self.f.K != self.params.K or self.f.grid != self.params.grid():
            raise ConfigurationError("distribution does not match params (K, N_u, u_max)")
        if self.frozen_phi is not None and self.frozen_phi.K != self.params.K:
            raise ConfigurationError("frozen potential has a different truncation")
        if not self.dt_max > 0:
            raise ConfigurationError("dt_max must be positive")


def _potential_coeffs(modal: np.ndarray, state: SolverState, ctx: _Context) -> np.ndarray:
    if state.frozen_phi is not None:
        return state.frozen_phi.coeffs
    f = GyroDistribution(modal, ctx.grid, state.params.K)
    rho = compute_density(f, ctx.table)
    return solve_potential(rho, ctx.table, mass_tol=math.inf).coeffs


def potential(state: SolverState) -> SpectralField2D:
    """Potential driving the transport of ``state`` (frozen or self-consistent)."""
    if state.frozen_phi is not None:
        return state.frozen_phi
    coeffs = _potential_coeffs(state.f.modal, state, solver_context(state.params))
    return SpectralField2D(coeffs, state.params.K, zero_mean=True)


def _drift_physical(phi_coeffs: np.ndarray, j0_field: np.ndarray, K: int):
    v1, v2 = drift_modal(phi_coeffs, j0_field, K)
    return to_physical(v1, K), to_physical(v2, K)


def _advection_modal(modal: np.ndarray, phi_coeffs: np.ndarray, j0_field: np.ndarray, K: int) -> np.ndarray:
    if not np.any(phi_coeffs):
        return np.zeros_like(modal)
    k1, k2 = wavenumbers(K)
    v1, v2 = _drift_physical(phi_coeffs, j0_field, K)
    d1 = to_physical(1j * k1[:, :, None] * modal, K)
    d2 = to_physical(1j * k2[:, :, None] * modal, K)
    return -from_physical(v1 * d1 + v2 * d2, K)


def advection_rhs(
    f: GyroDistribution, phi: SpectralField2D, table: MultiplierTable | None = None
) -> GyroDistribution:
    """``-(J0_u grad Phi)^perp . grad_x f`` per node, dealiased pseudo-spectrally."""
    if phi.K != f.K:
        raise ValueError("potential and distribution truncations differ")
    if table is None:
        from .bessel import j0

        k1, k2 = wavenumbers(f.K)
        kmag = np.sqrt(k1 * k1 + k2 * k2)
        j0_field = j0(kmag[:, :, None] * f.grid.nodes[None, None, :])
    else:
        j0_field = table.j0_field()
    coeffs = phi.coeffs.copy()
    coeffs[f.K, f.K] = 0.0
    return f.with_modal(_advection_modal(f.modal, coeffs, j0_field, f.K))


def max_drift(phi: SpectralField2D, table: MultiplierTable) -> float:
    """``max_{x, u_j} |J0_{u_j} grad Phi|`` on the dealiased grid."""
    if not np.any(phi.coeffs):
        return 0.0
    v1, v2 = _drift_physical(phi.coeffs, table.j0_field(), phi.K)
    return float(np.sqrt(np.max(v1 * v1 + v2 * v2)))


def cfl_dt(state: SolverState) -> float:
    """Advective step limit ``cfl * dx / max|drift|``, capped at ``dt_max``."""
    ctx = solver_context(state.params)
    phi = SpectralField2D(_potential_coeffs(state.f.modal, state, ctx), state.params.K)
    vmax = max_drift(phi, ctx.table)
    if vmax == 0.0:
        return state.dt_max
    dx = 2.0 * math.pi / physical_size(state.params.K)
    return min(state.dt_max, state.cfl * dx / vmax)


def _transport(modal: np.ndarray, dt: float, state: SolverState, ctx: _Context) -> np.ndarray:
    K = state.params.K
    decay = np.exp(-state.params.nu * ctx.k_squared * dt)[:, :, None]
    j0_field = ctx.table.j0_field()

    def rhs(m):
        return _advection_modal(m, _potential_coeffs(m, state, ctx), j0_field, K)

    stage = decay * (modal + dt * rhs(modal))
    return 0.5 * decay * modal + 0.5 * (stage + dt * rhs(stage))


def step(state: SolverState, dt: float) -> SolverState:
    """Advance by ``dt``; raises :class:`CFLViolationError` if ``dt > cfl_dt(state)``."""
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"time step must be positive and finite, got {dt}")
    limit = cfl_dt(state)
    if dt > limit * (1.0 + 1e-12):
        raise CFLViolationError(f"dt={dt:.6g} exceeds the stability limit {limit:.6g}")
    ctx = solver_context(state.params)
    modal = ctx.uop.trapezoidal_step(state.f.modal, 0.5 * dt)
    modal = _transport(modal, dt, state, ctx)
    modal = ctx.uop.trapezoidal_step(modal, 0.5 * dt)
    return replace(
        state, f=state.f.with_modal(modal), time=state.time + dt, step_count=state.step_count + 1
    )
