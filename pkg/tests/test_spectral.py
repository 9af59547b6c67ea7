import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import i0e, jv

from gyrofp.fields import TORUS_AREA, GyroDistribution, SpectralField2D
from gyrofp.grid import VelocityGrid
from gyrofp.spectral import (
    MassNormalizationWarning,
    MultiplierTable,
    compute_density,
    drift_velocity,
    gyroaverage,
    gyroaverage_u_derivative,
    ht_hat,
    ht_lower_bound,
    lt_inverse_bound,
    solve_potential,
)


@pytest.mark.parametrize("T", [0.1, 1.0, 10.0])
def test_ht_closed_form(T):
    for k in (0.5, 1.0, math.sqrt(2), 3.0, 17.0, 64.0 * math.sqrt(2)):
        assert abs(ht_hat(k, T) - i0e(0.5 * k * k * T)) < 1e-10


def test_ht_against_quad():
    T, k = 1.0, 2.5
    val = quad(lambda u: 2 / T * jv(0, k * u) ** 2 * math.exp(-u * u / T) * u, 0, 40, limit=400)[0]
    assert abs(ht_hat(k, T) - val) < 1e-10
    assert ht_hat(0.0, T) == 1.0
    with pytest.raises(ValueError):
        ht_hat(1.0, 0.0)


def test_lower_bounds_on_gap():
    for T in (0.1, 1.0, 10.0):
        ks = np.sqrt(np.arange(1, 64 * 64 * 2 + 1, 37))
        gap = np.array([1 - ht_hat(k, T) for k in ks])
        assert np.all(gap >= ht_lower_bound(ks, T) - 1e-10)
        assert np.max(T / gap) <= lt_inverse_bound(T) + 1e-8


def test_gyroaverage_is_bessel_multiplier():
    K = 6
    phi = SpectralField2D.from_modes(K, {(3, 4): 0.5})  # cos(3x+4y), |k| = 5
    u = 0.7
    avg = gyroaverage(phi, u)
    # brute-force circle average at a few points
    th = 2 * np.pi * np.arange(256) / 256
    for x, y in [(0.1, 0.2), (1.3, 4.0)]:
        brute = np.mean(np.cos(3 * (x + u * np.cos(th)) + 4 * (y + u * np.sin(th))))
        val = 2 * (avg.coeffs[K + 3, K + 4] * np.exp(1j * (3 * x + 4 * y))).real
        assert abs(val - brute) < 1e-12
    d = gyroaverage_u_derivative(phi, u)
    assert abs(d.coeffs[K + 3, K + 4] - 0.5 * -5 * jv(1, 5 * u)) < 1e-14
    with pytest.raises(ValueError):
        gyroaverage(phi, -1.0)


def test_density_by_hand():
    grid = VelocityGrid(16, 4.0)
    K = 2
    f = GyroDistribution.from_function(lambda a, b, u: np.exp(-u * u) * (1 + np.cos(a)), grid, K)
    rho = compute_density(f)
    prof = np.exp(-grid.nodes ** 2)
    assert abs(rho.coeffs[K, K] - np.dot(grid.weights, prof)) < 1e-13
    assert abs(rho.coeffs[K + 1, K] - 0.5 * np.dot(grid.weights, jv(0, grid.nodes) * prof)) < 1e-13
    table = MultiplierTable.build(K, 1.0, grid)
    assert np.allclose(compute_density(f, table).coeffs, rho.coeffs, atol=1e-15)


def test_potential_modes():
    grid = VelocityGrid(16, 6.0)
    K = 3
    table = MultiplierTable.build(K, 1.0, grid)
    rho = SpectralField2D.from_modes(K, {(0, 0): 1 / TORUS_AREA, (1, 0): 0.1})
    phi = solve_potential(rho, table)
    assert phi.coeffs[K, K] == 0
    assert abs(phi.coeffs[K + 1, K] - 0.1 / (1 - ht_hat(1.0, 1.0))) < 1e-10
    assert phi.is_hermitian()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        solve_potential(rho * 2.0, table)
    assert any(issubclass(w.category, MassNormalizationWarning) for w in caught)


def test_drift_divergence_free_and_orthogonal():
    K = 4
    phi = SpectralField2D.from_modes(K, {(1, 2): 0.3 + 0.1j, (3, -1): 0.2})
    v1, v2 = drift_velocity(phi, 0.5)
    k = np.arange(-K, K + 1)
    div = 1j * k[:, None] * v1.coeffs + 1j * k[None, :] * v2.coeffs
    assert np.max(np.abs(div)) < 1e-15
    avg = gyroaverage(phi, 0.5).values()
    g1 = SpectralField2D(1j * k[:, None] * gyroaverage(phi, 0.5).coeffs, K).values()
    g2 = SpectralField2D(1j * k[None, :] * gyroaverage(phi, 0.5).coeffs, K).values()
    assert np.max(np.abs(v1.values() * g1 + v2.values() * g2)) < 1e-14
    assert avg.shape == g1.shape
