"""Four-dimensional phase-space harness: gyro-coordinate equation and its limit.

The distribution ``g(x, v)`` lives on the ``x`` torus (Fourier, ``|k_i| <= K``)
times a Cartesian velocity box ``[-v_max, v_max]^2`` treated as periodic
(Fourier interpolation; the data must be negligible at the box edge). It obeys

    d_t g + (1/eps) v^perp . grad_v g + (J0_|v| grad Phi)^perp . grad_x g
        = beta D . (v g) + nu D . D g,      D = grad_v - c grad_x^perp

with ``c = 1`` in gyro-coordinates (field-free runs) and ``c = 0`` for the
plain four-dimensional Fokker-Planck form used with a fixed potential, where
``nu Lap_x g`` is added. A step is Strang-split: exact rotation by
``dt / 2 eps`` (three Fourier shears), an integrating-factor SSP-RK2 step of
the remaining terms, and a second half rotation.
"""

from __future__ import annotations

import math
import time as _time
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .bessel import j0, j1
from .config import HarnessSettings
from .fields import TORUS_AREA, GyroDistribution, SpectralField2D, from_physical, to_physical, wavenumbers
from .grid import VelocityGrid, WeightKind
from .norms import weighted_l2_norm
from .solver import PhysicalParams, SolverState, step
from .runner import evolve

__all__ = [
    "BoundaryLossWarning",
    "VelocityBox",
    "Gyro4DState",
    "rotate",
    "step_4d",
    "angular_average",
    "angular_harmonic",
    "harmonic_norm",
    "SweepEntry",
    "SweepReport",
    "epsilon_sweep",
    "EquivalenceLevel",
    "EquivalenceReport",
    "radial_equivalence",
    "gyrophase_datum",
    "HarnessRecord",
    "run_harness",
]

BOUNDARY_TOL = 1e-8


class BoundaryLossWarning(RuntimeWarning):
    """Appreciable mass has reached the edge of the velocity box."""


@dataclass(frozen=True)
class VelocityBox:
    """Cell-centred nodes ``-v_max + (i + 1/2) dv`` on each velocity axis."""

    n: int
    v_max: float

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ValueError(f"velocity box needs an even n >= 4, got {self.n}")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -self.v_max + (np.arange(self.n) + 0.5) * self.dv

    @property
    def eta(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * sfft.fftfreq(self.n, self.dv)

    @property
    def eta_odd(self) -> np.ndarray:
        """Wavenumbers for odd (derivative-like) multipliers: Nyquist entry zeroed."""
        eta = self.eta.copy()
        eta[self.n // 2] = 0.0
        return eta

    def interpolation_coefficients(self, samples: np.ndarray) -> np.ndarray:
        """``c_eta`` with ``g(v) = sum c_eta exp(i eta . v)`` over the last two axes.

        The Nyquist entries are dropped so the interpolant is real for real data.
        """
        phase = np.exp(-1j * self.eta * self.nodes[0])
        phase[self.n // 2] = 0.0
        coef = sfft.fft2(samples, axes=(-2, -1), norm="forward")
        return coef * phase[:, None] * phase[None, :]


@dataclass(frozen=True, eq=False)
class Gyro4DState:
    """``coeffs[k1 + K, k2 + K, i, j]`` is the ``x`` mode ``k`` at ``(v_1, v_2)_(i, j)``."""

    coeffs: np.ndarray
    box: VelocityBox
    K: int
    epsilon: float
    params: PhysicalParams
    time: float = 0.0
    phi: SpectralField2D | None = None
    coupling: int = 1
    step_count: int = 0

    def __post_init__(self):
        shape = (2 * self.K + 1, 2 * self.K + 1, self.box.n, self.box.n)
        if self.coeffs.shape != shape:
            raise ValueError(f"coefficients must have shape {shape}, got {self.coeffs.shape}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive (math.inf disables the rotation)")
        if self.coupling not in (0, 1):
            raise ValueError("coupling must be 0 or 1")
        if self.phi is not None and self.phi.K != self.K:
            raise ValueError("potential truncation differs from the state")

    @classmethod
    def from_function(cls, func, K: int, box: VelocityBox, epsilon: float, params: PhysicalParams, **kw):
        """Sample ``func(x1, x2, v1, v2)`` and truncate in ``x``."""
        from .fields import physical_size

        n = physical_size(K)
        x = 2.0 * np.pi * np.arange(n) / n
        v = box.nodes
        vals = func(x[:, None, None, None], x[None, :, None, None], v[None, None, :, None], v[None, None, None, :])
        vals = np.ascontiguousarray(np.broadcast_to(vals, (n, n, box.n, box.n)), dtype=float)
        return cls(from_physical(vals, K), box, K, epsilon, params, **kw)

    def values(self) -> np.ndarray:
        """Physical samples, shape ``(n_x, n_x, n_v, n_v)``."""
        return to_physical(self.coeffs, self.K)

    def mass(self) -> float:
        """``int g dx dv`` (trapezoid in ``v``)."""
        return float(TORUS_AREA * self.box.dv ** 2 * np.sum(self.coeffs[self.K, self.K].real))

    def active_modes(self) -> tuple[np.ndarray, np.ndarray]:
        if self.phi is not None and np.any(self.phi.coeffs):
            side = np.arange(2 * self.K + 1)
            a, b = np.meshgrid(side, side, indexing="ij")
            return a.ravel(), b.ravel()
        return np.nonzero(np.any(self.coeffs != 0, axis=(2, 3)))

    def boundary_fraction(self) -> float:
        """Largest ``|g|`` on the outermost ring of velocity cells, relative to the maximum."""
        mag = np.abs(self.coeffs).max(axis=(0, 1))
        peak = mag.max()
        if peak == 0:
            return 0.0
        edge = max(mag[0].max(), mag[-1].max(), mag[:, 0].max(), mag[:, -1].max())
        return float(edge / peak)


def _shear(g: np.ndarray, amount: float, box: VelocityBox, axis: int) -> np.ndarray:
    """``g(v_1 + a v_2, v_2)`` (``axis=-2``) or ``g(v_1, v_2 + a v_1)`` (``axis=-1``)."""
    eta = box.eta
    shift = amount * box.nodes
    mult = np.exp(1j * eta[:, None] * shift[None, :])
    mult[box.n // 2] = np.cos(eta[box.n // 2] * shift)
    if axis == -1:
        mult = mult.T
    spec = sfft.fft(g, axis=axis)
    return sfft.ifft(spec * mult, axis=axis)


def rotate(g: np.ndarray, angle: float, box: VelocityBox) -> np.ndarray:
    """``g(R_{-angle} v)`` on the last two axes: counter-clockwise rotation of the data."""
    if angle == 0:
        return g
    if abs(angle) >= 0.5 * np.pi:
        half = rotate(g, 0.5 * angle, box)
        return rotate(half, 0.5 * angle, box)
    a = math.tan(0.5 * angle)
    b = -math.sin(angle)
    g = _shear(g, a, box, -2)
    g = _shear(g, b, box, -1)
    return _shear(g, a, box, -2)


@lru_cache(maxsize=8)
def _drift_fields(phi_key: bytes, K: int, box: VelocityBox):
    phi = np.frombuffer(phi_key, dtype=complex).reshape(2 * K + 1, 2 * K + 1)
    k1, k2 = wavenumbers(K)
    v = box.nodes
    speed = np.sqrt(v[:, None] ** 2 + v[None, :] ** 2)
    kmag = np.sqrt(k1 * k1 + k2 * k2)
    avg = phi[:, :, None, None] * j0(kmag[:, :, None, None] * speed[None, None, :, :])
    w1 = to_physical(-1j * k2[:, :, None, None] * avg, K)
    w2 = to_physical(1j * k1[:, :, None, None] * avg, K)
    return w1, w2


def _rhs(ghat: np.ndarray, state: Gyro4DState, kperp1, kperp2, drift) -> np.ndarray:
    box = state.box
    v = box.nodes
    c = state.coupling
    g = sfft.ifft2(ghat, axes=(-2, -1))
    eta = box.eta_odd
    out = np.zeros_like(ghat)
    beta = state.params.beta
    if beta:
        a1 = sfft.fft2(v[:, None] * g, axes=(-2, -1))
        a2 = sfft.fft2(v[None, :] * g, axes=(-2, -1))
        out += 1j * beta * ((eta[:, None] - c * kperp1) * a1 + (eta[None, :] - c * kperp2) * a2)
    if drift is not None:
        K = state.K
        k1, k2 = wavenumbers(K)
        d1 = to_physical(1j * k1[:, :, None, None] * g, K)
        d2 = to_physical(1j * k2[:, :, None, None] * g, K)
        adv = from_physical(drift[0] * d1 + drift[1] * d2, K)
        out -= sfft.fft2(adv, axes=(-2, -1))
    return out


def step_4d(state: Gyro4DState, dt: float) -> Gyro4DState:
    """Advance the harness state by ``dt`` (requires ``dt <= 0.1 eps``)."""
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"time step must be positive and finite, got {dt}")
    if dt > 0.1 * state.epsilon * (1 + 1e-12):
        raise ValueError(f"dt={dt:.4g} does not resolve the rotation (need dt <= 0.1 eps)")
    box, K, nu = state.box, state.K, state.params.nu
    ia, ib = state.active_modes()
    g = state.coeffs[ia, ib]
    k1 = (ia - K).astype(float)[:, None, None]
    k2 = (ib - K).astype(float)[:, None, None]
    kperp1, kperp2 = -k2, k1
    angle = 0.0 if math.isinf(state.epsilon) else 0.5 * dt / state.epsilon

    eta, eta_odd = box.eta, box.eta_odd
    c = state.coupling
    symbol = -nu * (
        eta[:, None] ** 2 + eta[None, :] ** 2 + k1 ** 2 + k2 ** 2
        - 2.0 * c * (eta_odd[:, None] * kperp1 + eta_odd[None, :] * kperp2)
    )
    decay = np.exp(dt * symbol)

    drift = None
    full = len(ia) == (2 * K + 1) ** 2
    if state.phi is not None and np.any(state.phi.coeffs):
        drift = _drift_fields(np.ascontiguousarray(state.phi.coeffs).tobytes(), K, box)

    def rhs(gh):
        if drift is not None and full:
            shaped = gh.reshape(2 * K + 1, 2 * K + 1, box.n, box.n)
            return _rhs(shaped, state, kperp1.reshape(2 * K + 1, 2 * K + 1, 1, 1),
                        kperp2.reshape(2 * K + 1, 2 * K + 1, 1, 1), drift).reshape(gh.shape)
        return _rhs(gh, state, kperp1, kperp2, None)

    g = rotate(g, angle, box)
    ghat = sfft.fft2(g, axes=(-2, -1))
    stage = decay * (ghat + dt * rhs(ghat))
    ghat = 0.5 * decay * ghat + 0.5 * (stage + dt * rhs(stage))
    g = rotate(sfft.ifft2(ghat, axes=(-2, -1)), angle, box)

    coeffs = state.coeffs.copy()
    coeffs[ia, ib] = g
    new = replace(state, coeffs=coeffs, time=state.time + dt, step_count=state.step_count + 1)
    if new.boundary_fraction() > BOUNDARY_TOL:
        warnings.warn(
            f"velocity-box edge value exceeds {BOUNDARY_TOL:g} of the peak; periodic wrap-around is no longer negligible",
            BoundaryLossWarning,
            stacklevel=2,
        )
    return new


@lru_cache(maxsize=8)
def _ring_tables(box: VelocityBox, grid: VelocityGrid):
    eta = box.eta
    e1, e2 = eta[:, None], eta[None, :]
    mag = np.sqrt(e1 ** 2 + e2 ** 2)
    arg = mag[:, :, None] * grid.nodes[None, None, :]
    t0 = j0(arg)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(mag > 0, (e1 - 1j * e2) / np.where(mag > 0, mag, 1.0), 0.0)
    t1 = 1j * unit[:, :, None] * j1(arg)
    for arr in (t0, t1):
        arr.setflags(write=False)
    return t0, t1


def angular_harmonic(state: Gyro4DState, ell: int, grid: VelocityGrid) -> np.ndarray:
    """``(1/2pi) int g(x, u e^{i phi}) e^{-i ell phi} d phi`` at the nodes of ``grid``.

    Exact for the Fourier interpolant of the samples: each plane wave
    contributes ``i^ell J_ell(|eta| u) e^{-i ell alpha}``. Supports ``|ell| <= 1``;
    returns the ``x``-modal array of shape ``(2K+1, 2K+1, grid.n)``.
    """
    if grid.u_max > state.box.v_max * (1 + 1e-12):
        raise ValueError("target radii exceed the velocity box")
    if abs(ell) > 1:
        raise ValueError("only harmonics |ell| <= 1 are supported")
    t0, t1 = _ring_tables(state.box, grid)
    if ell == 0:
        table = t0
    elif ell == 1:
        table = t1
    else:
        # i^{-1} J_{-1}(z) e^{+i alpha} = -conj(i J_1(z) e^{-i alpha})
        table = -np.conj(t1)
    ia, ib = np.nonzero(np.any(state.coeffs != 0, axis=(2, 3)))
    out = np.zeros((2 * state.K + 1, 2 * state.K + 1, grid.n), dtype=complex)
    coef = state.box.interpolation_coefficients(state.coeffs[ia, ib])
    out[ia, ib] = np.tensordot(coef, table, axes=([1, 2], [0, 1]))
    return out


def angular_average(state: Gyro4DState, grid: VelocityGrid) -> GyroDistribution:
    """Gyrophase average of ``g`` at the radii of ``grid``."""
    return GyroDistribution(angular_harmonic(state, 0, grid), grid, state.K)


def harmonic_norm(modal: np.ndarray, grid: VelocityGrid) -> float:
    """``||h||_{2,u}`` of an ``x``-modal harmonic array."""
    per_node = TORUS_AREA * np.sum(np.abs(modal) ** 2, axis=(0, 1))
    return float(np.sqrt(np.dot(grid.weights, per_node)))


@dataclass(frozen=True)
class SweepEntry:
    epsilon: float
    steps: int
    error: float
    relative_error: float
    harmonic1_mean: float
    harmonic1_final: float
    mass_drift: float
    seconds: float


@dataclass(frozen=True)
class SweepReport:
    entries: tuple[SweepEntry, ...]
    t_end: float
    window: float
    limit_norm: float
    slack: float = 0.1

    def _ordered(self):
        return sorted(self.entries, key=lambda e: -e.epsilon)

    @property
    def error_decreasing(self) -> bool:
        """``e`` shrinks with ``eps`` up to the relative slack."""
        errs = [e.error for e in self._ordered()]
        return all(b <= (1 + self.slack) * a for a, b in zip(errs, errs[1:]))

    @property
    def error_strictly_decreasing(self) -> bool:
        errs = [e.error for e in self._ordered()]
        return all(b < a for a, b in zip(errs, errs[1:]))

    @property
    def harmonic_decreasing(self) -> bool:
        h = [e.harmonic1_mean for e in self._ordered()]
        return all(b < a for a, b in zip(h, h[1:]))

    @property
    def converged(self) -> bool:
        return self.error_decreasing and self.harmonic_decreasing

    def table(self) -> str:
        head = f"{'eps':>8s} {'steps':>6s} {'e(eps)':>12s} {'e/|f_lim|':>12s} {'<h1>_W':>12s} {'h1(t_end)':>12s} {'mass drift':>11s} {'sec':>6s}"
        rows = [head]
        for e in self._ordered():
            rows.append(
                f"{e.epsilon:8.4f} {e.steps:6d} {e.error:12.4e} {e.relative_error:12.4e} "
                f"{e.harmonic1_mean:12.4e} {e.harmonic1_final:12.4e} {e.mass_drift:11.2e} {e.seconds:6.1f}"
            )
        rows.append(f"t_end={self.t_end:g}, harmonic window={self.window:.4g}, |f_limit|_2,u={self.limit_norm:.4e}")
        rows.append(
            f"e(eps) decreasing (slack {self.slack:.0%}): {'yes' if self.error_decreasing else 'NO'}; "
            f"strictly: {'yes' if self.error_strictly_decreasing else 'NO'}; "
            f"<h1> decreasing: {'yes' if self.harmonic_decreasing else 'NO'}"
        )
        return "\n".join(rows)


def gyrophase_datum(amplitude: float):
    """``(1 + a cos x_1) (1 + v_1)^2 exp(-|v|^2)``: smooth, nonnegative, with ``ell = 0, 1, 2`` content."""

    def func(x1, x2, v1, v2):
        return (1.0 + amplitude * np.cos(x1)) * (1.0 + v1) ** 2 * np.exp(-(v1 ** 2 + v2 ** 2))

    return func


def epsilon_sweep(
    params: PhysicalParams,
    t_end: float,
    settings: HarnessSettings = HarnessSettings(),
    datum=None,
    limit_dt: float = 0.01,
) -> SweepReport:
    """Distance of gyrophase averages to the limit solution for each ``eps``.

    The ``ell = 1`` harmonic is averaged in time over the last
    ``2 pi max(eps)`` before ``t_end``: rotation alone keeps its pointwise
    size, so only the time average can reveal gyrophase mixing.
    """
    eps_list = tuple(sorted(settings.epsilons, reverse=True))
    if not eps_list:
        raise ValueError("empty epsilon list")
    window = 2.0 * np.pi * eps_list[0]
    if t_end < window:
        raise ValueError(f"t_end={t_end} shorter than one rotation period {window:.4g} of the largest eps")
    box = VelocityBox(settings.n_v, settings.v_max)
    K = settings.K_x
    datum = gyrophase_datum(settings.amplitude) if datum is None else datum
    limit_grid = VelocityGrid(settings.N_u_limit, settings.v_max)

    start = Gyro4DState.from_function(datum, K, box, eps_list[0], params)
    limit_params = replace(params, K=K, N_u=settings.N_u_limit, u_max=settings.v_max)
    f0 = angular_average(start, limit_grid)
    lim = SolverState(f0, 0.0, limit_params, frozen_phi=SpectralField2D.zeros(K, zero_mean=True), dt_max=limit_dt)
    f_limit = evolve(lim, t_end).f
    limit_norm = weighted_l2_norm(f_limit, WeightKind.U)

    entries = []
    for eps in eps_list:
        clock = _time.perf_counter()
        steps = int(math.ceil(t_end * settings.steps_per_turn / (2.0 * np.pi * eps)))
        dt = t_end / steps
        state = replace(start, epsilon=eps)
        m0 = state.mass()
        t_start = t_end - window - 1e-12
        h_sum = h_prev = t_first = None
        for _ in range(steps):
            state = step_4d(state, dt)
            if state.time < t_start:
                continue
            h = angular_harmonic(state, 1, limit_grid)
            if h_prev is None:
                h_sum, t_first = np.zeros_like(h), state.time
            else:
                h_sum += 0.5 * dt * (h + h_prev)
            h_prev = h
        span = state.time - t_first
        h_mean = h_sum / span if span > 0 else h_prev
        avg = angular_average(state, limit_grid)
        err = weighted_l2_norm(avg - f_limit, WeightKind.U)
        entries.append(
            SweepEntry(
                epsilon=eps,
                steps=steps,
                error=err,
                relative_error=err / limit_norm,
                harmonic1_mean=harmonic_norm(h_mean, limit_grid),
                harmonic1_final=harmonic_norm(h_prev, limit_grid),
                mass_drift=abs(state.mass() - m0) / abs(m0),
                seconds=_time.perf_counter() - clock,
            )
        )
    return SweepReport(tuple(entries), t_end, window, limit_norm)


@dataclass(frozen=True)
class EquivalenceLevel:
    N_u: int
    n_v: int
    error: float
    relative_error: float


@dataclass(frozen=True)
class EquivalenceReport:
    levels: tuple[EquivalenceLevel, ...]

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(a.error / b.error for a, b in zip(self.levels, self.levels[1:]))

    def table(self) -> str:
        rows = [f"{'N_u':>5s} {'n_v':>5s} {'error':>12s} {'relative':>12s}"]
        for lv in self.levels:
            rows.append(f"{lv.N_u:5d} {lv.n_v:5d} {lv.error:12.4e} {lv.relative_error:12.4e}")
        rows.append("refinement ratios: " + ", ".join(f"{r:.2f}" for r in self.ratios))
        return "\n".join(rows)


def radial_equivalence(
    params: PhysicalParams,
    phi: SpectralField2D,
    t_end: float,
    levels=((16, 32), (32, 64)),
    T0: float = 1.5,
    amplitude: float = 0.5,
    dt: float = 0.01,
    v_max: float = 6.0,
) -> EquivalenceReport:
    """Compare the gyrophase average of the four-dimensional run (``c = 0``,
    no rotation) with the ``u`` solver under the same fixed potential, for
    radial data ``exp(-u^2/T0) (1 + a cos x_1)`` at each ``(N_u, n_v)``."""
    K = phi.K
    out = []
    for N_u, n_v in levels:
        box = VelocityBox(n_v, v_max)

        def datum(x1, x2, v1, v2):
            return (1.0 + amplitude * np.cos(x1)) * np.exp(-(v1 ** 2 + v2 ** 2) / T0)

        state = Gyro4DState.from_function(datum, K, box, math.inf, params, phi=phi, coupling=0)
        steps = int(round(t_end / dt))
        for _ in range(steps):
            state = step_4d(state, t_end / steps)
        p1 = replace(params, K=K, N_u=N_u, u_max=v_max)
        grid = p1.grid()
        f0 = GyroDistribution.from_function(
            lambda x1, x2, u: (1.0 + amplitude * np.cos(x1)) * np.exp(-u * u / T0), grid, K
        )
        one = SolverState(f0, 0.0, p1, frozen_phi=phi, dt_max=t_end / steps)
        for _ in range(steps):
            one = step(one, t_end / steps)
        diff = angular_average(state, grid) - one.f
        err = weighted_l2_norm(diff, WeightKind.U)
        out.append(EquivalenceLevel(N_u, n_v, err, err / weighted_l2_norm(one.f, WeightKind.U)))
    return EquivalenceReport(tuple(out))


@dataclass(frozen=True)
class HarnessRecord:
    t: float
    mass: float
    average_norm: float
    harmonic1_norm: float


def run_harness(
    params: PhysicalParams,
    t_end: float,
    settings: HarnessSettings = HarnessSettings(),
    record_interval: float | None = None,
    datum=None,
) -> tuple[Gyro4DState, list[HarnessRecord]]:
    """Single gyro-coordinate run at ``settings.epsilon`` with periodic records."""
    eps = settings.epsilon
    box = VelocityBox(settings.n_v, settings.v_max)
    grid = VelocityGrid(max(32, settings.n_v), settings.v_max)
    datum = gyrophase_datum(settings.amplitude) if datum is None else datum
    state = Gyro4DState.from_function(datum, settings.K_x, box, eps, params)
    dt0 = 2.0 * np.pi * eps / settings.steps_per_turn
    interval = t_end if record_interval is None else record_interval

    def record(s):
        return HarnessRecord(
            s.time,
            s.mass(),
            harmonic_norm(angular_harmonic(s, 0, grid), grid),
            harmonic_norm(angular_harmonic(s, 1, grid), grid),
        )

    records = [record(state)]
    targets = [min(t_end, interval * i) for i in range(1, int(math.ceil(t_end / interval - 1e-9)) + 1)]
    for target in targets:
        span = target - state.time
        if span <= 0:
            continue
        steps = int(math.ceil(span / dt0 - 1e-9))
        for _ in range(steps):
            state = step_4d(state, span / steps)
        state = replace(state, time=target)
        records.append(record(state))
    return state, records
