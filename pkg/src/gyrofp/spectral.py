"""Fourier-multiplier operators of the model.

Gyro-average ``J0_u`` multiplies mode ``k`` by ``J0(|k| u)``. The
electroneutrality closure ``Phi - Phi * H_T = T (rho - 1)`` is inverted mode
by mode with ``Phi_k = T rho_k / (1 - H_T(|k|))`` for ``k != 0`` and
``Phi_0 = 0``, where

    H_T(k) = (2 / T) int_0^inf J0(k u)^2 exp(-u^2 / T) u du.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bessel import j0, j0_prime
from .fields import TORUS_AREA, GyroDistribution, SpectralField2D, wavenumbers
from .grid import VelocityGrid

__all__ = [
    "SingularMultiplierError",
    "MassNormalizationWarning",
    "gyroaverage",
    "gyroaverage_u_derivative",
    "ht_hat",
    "ht_quadrature_grid",
    "lt_inverse_bound",
    "ht_lower_bound",
    "MultiplierTable",
    "compute_density",
    "solve_potential",
    "drift_velocity",
    "drift_modal",
]

HT_CUTOFF = 6.0
HT_MIN_NODES = 512
# nodes per half-oscillation of J0(k u)^2 (endpoint error is O((k du)^6))
HT_NODES_PER_PERIOD = 56


class SingularMultiplierError(ArithmeticError):
    """``1 - H_T(k)`` is numerically zero for some ``k != 0``."""


class MassNormalizationWarning(RuntimeWarning):
    """Density passed to the potential solve is not mass-normalised."""


def _magnitudes(K: int) -> np.ndarray:
    k1, k2 = wavenumbers(K)
    return np.sqrt(k1 * k1 + k2 * k2)


def gyroaverage(field: SpectralField2D, u: float) -> SpectralField2D:
    """Average of ``field`` over circles of radius ``u``."""
    if not (u >= 0 and math.isfinite(u)):
        raise ValueError(f"gyro-radius must be a nonnegative finite number, got {u}")
    mult = j0(_magnitudes(field.K) * u)
    return SpectralField2D(field.coeffs * mult, field.K, field.zero_mean)


def gyroaverage_u_derivative(field: SpectralField2D, u: float) -> SpectralField2D:
    """``d/du (J0_u field)``: mode ``k`` multiplied by ``|k| J0'(|k| u)``."""
    if not (u >= 0 and math.isfinite(u)):
        raise ValueError(f"gyro-radius must be a nonnegative finite number, got {u}")
    kmag = _magnitudes(field.K)
    return SpectralField2D(field.coeffs * kmag * j0_prime(kmag * u), field.K, field.zero_mean)


def ht_quadrature_grid(k_mag: float, T: float) -> VelocityGrid:
    u_max = HT_CUTOFF * math.sqrt(T)
    n = max(HT_MIN_NODES, int(math.ceil(HT_NODES_PER_PERIOD * k_mag * u_max / math.pi)))
    return VelocityGrid(n, u_max)


def ht_hat(k_mag: float, T: float, grid: VelocityGrid | None = None) -> float:
    """Electroneutrality multiplier ``H_T(|k|)`` by quadrature on a ``u`` grid.

    Without ``grid`` a rule with ``u_max = 6 sqrt(T)`` and enough nodes to
    resolve ``J0(k u)^2`` is built; the result is then accurate to ``1e-10``.
    """
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"temperature must be positive, got {T}")
    if not (k_mag >= 0 and math.isfinite(k_mag)):
        raise ValueError(f"|k| must be nonnegative, got {k_mag}")
    if k_mag == 0:
        return 1.0
    if grid is None:
        grid = ht_quadrature_grid(k_mag, T)
    elif grid.u_max < HT_CUTOFF * math.sqrt(T) * (1 - 1e-12):
        raise ValueError(f"grid u_max={grid.u_max} below {HT_CUTOFF} sqrt(T)")
    u = grid.nodes
    # weights carry 2 pi u du: (2/T) int g u du = (1 / (pi T)) sum w g
    return float(np.dot(grid.weights, j0(k_mag * u) ** 2 * np.exp(-u * u / T)) / (math.pi * T))


def ht_lower_bound(k_mag, T: float):
    """Lower bound ``(|k|^2 T / 4)(1 - exp(-1 / (|k|^2 T)))`` on ``1 - H_T``."""
    x = np.asarray(k_mag, dtype=float) ** 2 * T
    return 0.25 * x * -np.expm1(-1.0 / x)


def lt_inverse_bound(T: float) -> float:
    """Norm bound ``c_T = 4 / (1 - exp(-1/T))`` of the inverse closure operator."""
    return 4.0 / -math.expm1(-1.0 / T)


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Precomputed multipliers for one ``(K, T, grid)``, deduplicated by ``|k|``.

    ``index[k1 + K, k2 + K]`` points into the per-magnitude arrays.
    """

    K: int
    T: float
    grid: VelocityGrid
    magnitudes: np.ndarray
    index: np.ndarray
    j0_table: np.ndarray
    ht: np.ndarray
    lt_inv: np.ndarray

    _cache = {}

    @classmethod
    def build(cls, K: int, T: float, grid: VelocityGrid) -> "MultiplierTable":
        key = (K, float(T), grid.key())
        table = cls._cache.get(key)
        if table is None:
            table = cls._compute(K, T, grid)
            cls._cache[key] = table
        return table

    @classmethod
    def _compute(cls, K: int, T: float, grid: VelocityGrid) -> "MultiplierTable":
        if not (T > 0 and math.isfinite(T)):
            raise ValueError(f"temperature must be positive, got {T}")
        k1, k2 = wavenumbers(K)
        sq = (k1 * k1 + k2 * k2).astype(np.int64)
        uniq, inverse = np.unique(sq, return_inverse=True)
        mags = np.sqrt(uniq.astype(float))
        ht = np.array([ht_hat(m, T) for m in mags])
        gap = 1.0 - ht
        if np.any(gap[1:] < 1e-14):
            raise SingularMultiplierError("1 - H_T(k) below 1e-14 for some k != 0")
        lt_inv = np.zeros_like(ht)
        lt_inv[1:] = T / gap[1:]
        j0_table = j0(mags[:, None] * grid.nodes[None, :])
        for arr in (mags, ht, lt_inv, j0_table):
            arr.setflags(write=False)
        return cls(K, float(T), grid, mags, inverse.reshape(sq.shape), j0_table, ht, lt_inv)

    def j0_field(self) -> np.ndarray:
        """``J0(|k| u_j)`` on the full modal array, shape ``(2K+1, 2K+1, N_u)``."""
        return self.j0_table[self.index]

    def lt_inv_field(self) -> np.ndarray:
        return self.lt_inv[self.index]

    def ht_field(self) -> np.ndarray:
        return self.ht[self.index]


def compute_density(f: GyroDistribution, table: MultiplierTable | None = None) -> SpectralField2D:
    """Gyro-averaged density ``rho_k = sum_j w_j J0(|k| u_j) f_k(u_j)``."""
    if table is not None:
        mult = table.j0_field()
    else:
        mult = j0(_magnitudes(f.K)[:, :, None] * f.grid.nodes[None, None, :])
    # fixed-order contraction for reproducibility
    coeffs = np.tensordot(mult * f.modal, f.grid.weights, axes=([2], [0]))
    return SpectralField2D(coeffs, f.K)


def solve_potential(rho: SpectralField2D, table: MultiplierTable, mass_tol: float = 1e-8) -> SpectralField2D:
    """Invert the electroneutrality closure in the zero-mean gauge."""
    if rho.K != table.K:
        raise ValueError("density and multiplier table truncations differ")
    mass = rho.mean * TORUS_AREA
    if abs(mass - 1.0) > mass_tol:
        warnings.warn(
            f"density carries mass {mass:.12g}, expected 1", MassNormalizationWarning, stacklevel=2
        )
    coeffs = rho.coeffs * table.lt_inv_field()
    coeffs[table.K, table.K] = 0.0
    return SpectralField2D(coeffs, rho.K, zero_mean=True)


def drift_velocity(phi: SpectralField2D, u: float) -> tuple[SpectralField2D, SpectralField2D]:
    """Components of ``(J0_u grad Phi)^perp = (-d2 J0_u Phi, d1 J0_u Phi)``."""
    avg = gyroaverage(phi, u)
    k1, k2 = wavenumbers(phi.K)
    v1 = SpectralField2D(-1j * k2 * avg.coeffs, phi.K, zero_mean=True)
    v2 = SpectralField2D(1j * k1 * avg.coeffs, phi.K, zero_mean=True)
    return v1, v2


def drift_modal(phi_coeffs: np.ndarray, j0_field: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Drift components for every node at once, each ``(2K+1, 2K+1, N_u)``."""
    k1, k2 = wavenumbers(K)
    avg = phi_coeffs[:, :, None] * j0_field
    return -1j * k2[:, :, None] * avg, 1j * k1[:, :, None] * avg
