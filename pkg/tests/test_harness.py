import math
import warnings

import numpy as np
import pytest

from gyrofp.fields import SpectralField2D
from gyrofp.grid import VelocityGrid
from gyrofp.harness import (
    BoundaryLossWarning,
    Gyro4DState,
    VelocityBox,
    angular_average,
    angular_harmonic,
    gyrophase_datum,
    rotate,
    step_4d,
)
from gyrofp.solver import PhysicalParams

BOX = VelocityBox(48, 6.0)
V = BOX.nodes


def gauss(v1, v2, c=(0.7, -0.4), s=0.8):
    return np.exp(-((v1 - c[0]) ** 2 + (v2 - c[1]) ** 2) / s)


def test_box_basics():
    assert math.isclose(BOX.dv, 0.25)
    assert np.allclose(V[:2], [-5.875, -5.625])
    assert BOX.eta_odd[24] == 0.0 and BOX.eta[24] != 0.0
    with pytest.raises(ValueError):
        VelocityBox(7, 1.0)


def test_interpolant_reproduces_samples():
    g = gauss(V[:, None], V[None, :])
    c = BOX.interpolation_coefficients(g)
    recon = np.einsum("ab,ia,jb->ij", c, np.exp(1j * BOX.eta[None, :] * V[:, None]), np.exp(1j * BOX.eta[None, :] * V[:, None]))
    assert np.max(np.abs(recon - g)) < 1e-12


@pytest.mark.parametrize("angle, tol", [(0.05, 1e-13), (0.3, 1e-13), (-1.1, 1e-10), (math.pi / 2, 1e-7), (2.5, 1e-7)])
def test_rotation_matches_exact(angle, tol):
    g = gauss(V[:, None], V[None, :])
    ca, sa = math.cos(angle), math.sin(angle)
    # counter-clockwise rotation of the data: value at v is g(R_{-angle} v)
    w1 = ca * V[:, None] + sa * V[None, :]
    w2 = -sa * V[:, None] + ca * V[None, :]
    # large angles shear the data across the periodic seam, costing accuracy
    assert np.max(np.abs(rotate(g, angle, BOX) - gauss(w1, w2))) < tol


def test_rotation_group_law():
    g = gauss(V[:, None], V[None, :]).astype(complex)
    a = rotate(rotate(g, 0.1, BOX), 0.2, BOX)
    assert np.max(np.abs(a - rotate(g, 0.3, BOX))) < 1e-13
    steps = [rotate(g, 0.05 * i, BOX) for i in (1, 2)]
    assert np.max(np.abs(rotate(steps[0], 0.05, BOX) - steps[1])) < 1e-13
    assert np.max(np.abs(rotate(g, 2 * math.pi, BOX) - g)) < 1e-7


def test_angular_average_and_harmonic_oracles():
    params = PhysicalParams()
    grid = VelocityGrid(16, 4.0)
    u = grid.nodes
    st = Gyro4DState.from_function(lambda x1, x2, v1, v2: v1 ** 2 * np.exp(-(v1 ** 2 + v2 ** 2)), 2, BOX, 1.0, params)
    avg = angular_average(st, grid).modal[2, 2]
    assert np.max(np.abs(avg - 0.5 * u * u * np.exp(-u * u))) < 1e-10
    st = Gyro4DState.from_function(lambda x1, x2, v1, v2: v1 * np.exp(-(v1 ** 2 + v2 ** 2)), 2, BOX, 1.0, params)
    h1 = angular_harmonic(st, 1, grid)[2, 2]
    assert np.max(np.abs(h1 - 0.5 * u * np.exp(-u * u))) < 1e-10
    hm = angular_harmonic(st, -1, grid)[2, 2]
    assert np.max(np.abs(hm - 0.5 * u * np.exp(-u * u))) < 1e-10
    with pytest.raises(ValueError):
        angular_harmonic(st, 2, grid)


def test_angular_average_against_brute_force_ring():
    params = PhysicalParams()
    grid = VelocityGrid(8, 3.0)
    datum = gyrophase_datum(0.5)
    st = Gyro4DState.from_function(datum, 2, BOX, 1.0, params)
    avg = angular_average(st, grid).modal[2 + 1, 2].real
    phi = 2 * np.pi * np.arange(4096) / 4096
    brute = [
        0.25 * np.mean((1 + u * np.cos(phi)) ** 2) * np.exp(-u * u) for u in grid.nodes
    ]
    assert np.max(np.abs(avg - brute)) < 1e-9


def test_radial_data_has_no_odd_harmonic():
    st = Gyro4DState.from_function(
        lambda x1, x2, v1, v2: np.cos(x1) * np.exp(-(v1 ** 2 + v2 ** 2)), 2, BOX, 1.0, PhysicalParams()
    )
    assert np.max(np.abs(angular_harmonic(st, 1, VelocityGrid(12, 5.0)))) < 1e-12


def test_mass_conserved_over_many_steps():
    params = PhysicalParams(nu=0.01, beta=0.1)
    box = VelocityBox(48, 6.0)
    st = Gyro4DState.from_function(gyrophase_datum(0.5), 2, box, 0.1, params)
    m0 = st.mass()
    with warnings.catch_warnings():
        warnings.simplefilter("error", BoundaryLossWarning)
        for _ in range(1000):
            st = step_4d(st, 0.003)
    assert abs(st.mass() - m0) < 1e-12 * abs(m0)
    assert math.isclose(st.time, 3.0)


def test_step_guards():
    st = Gyro4DState.from_function(gyrophase_datum(0.5), 1, VelocityBox(16, 6.0), 0.1, PhysicalParams())
    with pytest.raises(ValueError):
        step_4d(st, 0.02)
    with pytest.raises(ValueError):
        step_4d(st, -0.001)
    with pytest.raises(ValueError):
        Gyro4DState(st.coeffs, st.box, 1, 0.0, st.params)


def test_pure_rotation_period():
    # with nu = beta = 0 and no field the state returns after one gyro-period
    params = PhysicalParams(nu=0.0, beta=0.0)
    eps = 0.1
    st = Gyro4DState.from_function(gyrophase_datum(0.5), 1, BOX, eps, params)
    start = st.coeffs.copy()
    steps = 64
    for _ in range(steps):
        st = step_4d(st, 2 * math.pi * eps / steps)
    assert np.max(np.abs(st.coeffs - start)) < 1e-9


@pytest.mark.filterwarnings("ignore::gyrofp.harness.BoundaryLossWarning")
def test_field_couples_modes():
    params = PhysicalParams()
    phi = SpectralField2D.from_modes(2, {(0, 1): 0.2}, zero_mean=True)
    st = Gyro4DState.from_function(
        lambda x1, x2, v1, v2: (1 + 0.5 * np.cos(x1)) * np.exp(-(v1 ** 2 + v2 ** 2)), 2, VelocityBox(16, 6.0),
        math.inf, params, phi=phi, coupling=0,
    )
    out = step_4d(st, 0.01)
    assert np.max(np.abs(out.coeffs[2 + 1, 2 + 1])) > 1e-6
