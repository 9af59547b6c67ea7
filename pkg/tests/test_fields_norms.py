import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gyrofp.fields import TORUS_AREA, GyroDistribution, SpectralField2D, from_physical, physical_size, to_physical
from gyrofp.grid import VelocityGrid, WeightKind, integrate_u
from gyrofp.norms import gradient_norm, l2m_l4_norm, sobolev_norm, weighted_l2_norm


def random_field(K, rng, zero_mean=True):
    c = rng.normal(size=(2 * K + 1, 2 * K + 1)) + 1j * rng.normal(size=(2 * K + 1, 2 * K + 1))
    c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    return SpectralField2D(c, K, zero_mean)


def test_physical_size():
    assert physical_size(32) == 100
    assert physical_size(10) == 32
    assert physical_size(5) == 16


def test_round_trip_and_reality():
    rng = np.random.default_rng(1)
    f = random_field(7, rng, zero_mean=False)
    vals = f.values()
    assert vals.dtype == float
    assert np.allclose(from_physical(vals, 7), f.coeffs, atol=1e-13)


def test_single_mode_nodal():
    K = 4
    f = SpectralField2D.from_modes(K, {(1, 2): 0.5})
    n = physical_size(K)
    x = 2 * np.pi * np.arange(n) / n
    assert np.allclose(f.values(), np.cos(x[:, None] + 2 * x[None, :]), atol=1e-14)
    g = SpectralField2D.from_function(lambda a, b: np.sin(3 * a) - 2.0, K)
    assert math.isclose(g.mean, -2.0)
    assert abs(g.coeffs[K + 3, K] - (-0.5j)) < 1e-14
    assert g.is_hermitian()


def test_zero_mean_flag_drops_mean():
    f = SpectralField2D.from_modes(3, {(0, 0): 2.0, (1, 0): 1.0}, zero_mean=True)
    assert f.mean == 0.0


def test_sobolev_norm_by_hand():
    K = 3
    f = SpectralField2D.from_modes(K, {(1, 1): 1.0 + 1j, (0, 2): 0.5})
    # 2 |1+i|^2 3^s + 2 (0.25) 5^s
    for s in (0.0, 0.5, 1.0):
        assert math.isclose(sobolev_norm(f, s), math.sqrt(4 * 3 ** s + 0.5 * 5 ** s), rel_tol=1e-14)


def test_l2_norm_matches_nodal_quadrature():
    grid = VelocityGrid(12, 4.0)
    K = 5
    f = GyroDistribution.from_function(
        lambda a, b, u: np.exp(-u * u) * (1 + 0.3 * np.cos(a - 2 * b) + 0.2 * np.sin(3 * b)), grid, K
    )
    vals = f.values()
    n = vals.shape[0]
    brute = math.sqrt(integrate_u(TORUS_AREA / n ** 2 * np.sum(vals ** 2, axis=(0, 1)), grid, WeightKind.M))
    assert math.isclose(weighted_l2_norm(f, WeightKind.M), brute, rel_tol=1e-12)
    l4 = integrate_u(np.sqrt(TORUS_AREA / n ** 2 * np.sum(vals ** 4, axis=(0, 1))), grid, WeightKind.M)
    assert math.isclose(l2m_l4_norm(f), math.sqrt(l4), rel_tol=1e-12)


def test_gradient_norm_single_mode():
    grid = VelocityGrid(8, 2.0)
    K = 4
    f = GyroDistribution.from_function(lambda a, b, u: np.cos(3 * a) * np.ones_like(u), grid, K)
    # ||3 sin 3x||^2_{L2} = 9 A / 2
    expected = math.sqrt(4.5 * TORUS_AREA * np.sum(grid.weights_for(WeightKind.M)))
    assert math.isclose(gradient_norm(f), expected, rel_tol=1e-12)


def test_mass():
    grid = VelocityGrid(64, 6.0)
    f = GyroDistribution.from_function(lambda a, b, u: np.exp(-u * u) * (1 + 0.5 * np.cos(a)), grid, 3)
    assert math.isclose(f.mass(), TORUS_AREA * math.pi * -math.expm1(-36), rel_tol=1e-5)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 31))
def test_parseval(K, seed):
    f = random_field(K, np.random.default_rng(seed), zero_mean=False)
    vals = to_physical(f.coeffs, K)
    n = vals.shape[0]
    assert math.isclose(np.sum(vals ** 2) / n ** 2, np.sum(np.abs(f.coeffs) ** 2), rel_tol=1e-11)
