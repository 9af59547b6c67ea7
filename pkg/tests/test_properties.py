import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gyrofp.fields import GyroDistribution, SpectralField2D
from gyrofp.grid import VelocityGrid, WeightKind
from gyrofp.norms import sobolev_norm, weighted_l2_norm, weighted_sobolev_norm
from gyrofp.spectral import compute_density, gyroaverage, gyroaverage_u_derivative

SLACK = 1e-8
radii = st.sampled_from([0.1, 1.0, 5.0]) | st.floats(min_value=1e-3, max_value=20.0)
orders = st.sampled_from([0.0, 0.5, 1.0])
seeds = st.integers(0, 2 ** 32 - 1)


def hermitian(c):
    return 0.5 * (c + np.conj(c[::-1, ::-1]))


def random_zero_mean(K, rng):
    shape = (2 * K + 1, 2 * K + 1)
    k = np.arange(-K, K + 1)
    decay = (1.0 + k[:, None] ** 2 + k[None, :] ** 2) ** -rng.uniform(0.0, 1.5)
    c = hermitian((rng.normal(size=shape) + 1j * rng.normal(size=shape)) * decay)
    return SpectralField2D(c, K, zero_mean=True)


def random_distribution(K, grid, rng):
    shape = (2 * K + 1, 2 * K + 1, grid.n)
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    c *= np.exp(-grid.nodes ** 2 / rng.uniform(0.3, 3.0))
    c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    f = GyroDistribution(c, grid, K)
    return f * (1.0 / f.mass()) if abs(f.mass()) > 1e-8 else f


@settings(max_examples=60, deadline=None)
@given(seeds, radii, orders)
def test_gyroaverage_does_not_increase_norms(seed, u, s):
    phi = random_zero_mean(8, np.random.default_rng(seed))
    avg = gyroaverage(phi, u)
    base = sobolev_norm(phi, s)
    assert sobolev_norm(avg, s) <= base * (1 + SLACK)
    assert sobolev_norm(avg, s + 0.5) <= 2 ** 0.25 / math.sqrt(u) * base * (1 + SLACK)


@settings(max_examples=60, deadline=None)
@given(seeds, radii, orders)
def test_radial_derivative_smoothing(seed, u, s):
    phi = random_zero_mean(8, np.random.default_rng(seed))
    lhs = sobolev_norm(gyroaverage_u_derivative(phi, u), s)
    assert lhs <= sobolev_norm(phi, s + 0.5) / math.sqrt(u) * (1 + SLACK)


@settings(max_examples=40, deadline=None)
@given(seeds, orders)
def test_density_regularity(seed, s):
    grid = VelocityGrid(32, 6.0)
    f = random_distribution(6, grid, np.random.default_rng(seed))
    rho = compute_density(f)
    fluct = SpectralField2D(rho.coeffs, f.K, zero_mean=True)
    bound = 2 ** 0.25 * math.pi * weighted_sobolev_norm(f, s, WeightKind.M)
    assert sobolev_norm(fluct, s + 0.5) <= bound * (1 + SLACK)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_m_norm_dominates_u_norm(seed):
    grid = VelocityGrid(16, 4.0)
    f = random_distribution(3, grid, np.random.default_rng(seed))
    assert weighted_l2_norm(f, WeightKind.M) >= weighted_l2_norm(f, WeightKind.U)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(min_value=0.01, max_value=100.0))
def test_norms_homogeneous(seed, lam):
    grid = VelocityGrid(8, 2.0)
    f = random_distribution(2, grid, np.random.default_rng(seed))
    assert math.isclose(weighted_l2_norm(f * lam), lam * weighted_l2_norm(f), rel_tol=1e-12)
