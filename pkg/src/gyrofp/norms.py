"""Weighted norms of distributions and Sobolev norms of torus fields.

Two normalisations appear, matching how the estimates use them:

* ``L^2(x)`` and ``L^4(x)`` norms are taken with ``dx`` on the torus of area
  ``4 pi^2`` (Parseval: ``||g||_2^2 = A sum_k |g_k|^2``);
* ``H^s`` norms are coefficient sums ``(sum_k (1 + |k|^2)^s |g_k|^2)^(1/2)``.
"""

from __future__ import annotations

import numpy as np

from .fields import TORUS_AREA, GyroDistribution, SpectralField2D, wavenumbers
from .grid import WeightKind, integrate_u

__all__ = [
    "slice_l2_squared",
    "weighted_l2_norm",
    "l2m_l4_norm",
    "sobolev_norm",
    "sobolev_weights",
    "weighted_sobolev_norm",
    "gradient_norm",
]


def sobolev_weights(K: int, s: float) -> np.ndarray:
    k1, k2 = wavenumbers(K)
    return (1.0 + k1 * k1 + k2 * k2) ** s


def slice_l2_squared(f: GyroDistribution) -> np.ndarray:
    """``||f(., u_j)||^2_{L^2(x)}`` for every node, by Parseval."""
    return TORUS_AREA * np.sum(np.abs(f.modal) ** 2, axis=(0, 1))


def weighted_l2_norm(f: GyroDistribution, weight: WeightKind = WeightKind.U) -> float:
    """``(sum_j wt_j ||f(., u_j)||^2_{L^2(x)})^(1/2)``."""
    return float(np.sqrt(integrate_u(slice_l2_squared(f), f.grid, weight)))


def l2m_l4_norm(f: GyroDistribution, values: np.ndarray | None = None) -> float:
    """``(sum_j m-weight_j ||f(., u_j)||^2_{L^4(x)})^(1/2)`` on the dealiased grid.

    ``values`` may pass precomputed physical samples of shape ``(n, n, N_u)``.
    """
    vals = f.values() if values is None else values
    n = vals.shape[0]
    l4_4 = TORUS_AREA / (n * n) * np.sum(vals ** 4, axis=(0, 1))
    return float(np.sqrt(integrate_u(np.sqrt(l4_4), f.grid, WeightKind.M)))


def sobolev_norm(field: SpectralField2D, s: float) -> float:
    """``(sum_k (1 + |k|^2)^s |c_k|^2)^(1/2)``; the mean is skipped for zero-mean fields."""
    w = sobolev_weights(field.K, s)
    power = np.abs(field.coeffs) ** 2
    if field.zero_mean:
        power = power.copy()
        power[field.K, field.K] = 0.0
    return float(np.sqrt(np.sum(w * power)))


def weighted_sobolev_norm(f: GyroDistribution, s: float, weight: WeightKind = WeightKind.M) -> float:
    """``||f||_{L^2_w(H^s)}`` with coefficient ``H^s`` norms."""
    w = sobolev_weights(f.K, s)[:, :, None]
    per_node = np.sum(w * np.abs(f.modal) ** 2, axis=(0, 1))
    return float(np.sqrt(integrate_u(per_node, f.grid, weight)))


def gradient_norm(f: GyroDistribution, weight: WeightKind = WeightKind.M) -> float:
    """``||grad_x f||_{2,weight}``."""
    k1, k2 = wavenumbers(f.K)
    per_node = TORUS_AREA * np.sum((k1 * k1 + k2 * k2)[:, :, None] * np.abs(f.modal) ** 2, axis=(0, 1))
    return float(np.sqrt(integrate_u(per_node, f.grid, weight)))
