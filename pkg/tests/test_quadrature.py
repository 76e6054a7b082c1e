import numpy as np
import pytest

from dimerdpp.quadrature import (
    NonConvergenceError,
    circle_grid,
    circle_integral,
    contour_integral,
    double_contour_integral,
    fourier_coefficients,
    interval_grid,
    nested_circle_integral,
    ray_grid,
    until_stable,
)


def test_circle_grid_residue():
    g = circle_grid(0.7, 32, center=0.1)
    val = g.integrate(1.0 / (g.nodes - 0.2)) / (2j * np.pi)
    assert abs(val - 1) < 1e-14


def test_interval_grid_polynomial_exact():
    g = interval_grid(-1.0, 2.0, 5)
    assert abs(g.integrate(g.nodes**8) - (2**9 + 1) / 9) < 1e-11


def test_ray_grid_integrates_along_segment():
    g = ray_grid(1.0, np.pi / 2, 2.0, 16)
    # int of dz over the segment from 1 to 1 + 2i
    assert abs(g.integrate(np.ones(len(g))) - 2j) < 1e-14


def test_contour_integral_picks_coefficient():
    f = lambda z: np.exp(z) / z**4
    assert abs(contour_integral(f, 1.0) - 1 / 6) < 1e-13


def test_circle_integral_off_center():
    f = lambda z: 1.0 / ((z - 2.0) * (z - 5.0))
    assert abs(circle_integral(f, (2.0, 1.0)) - (-1 / 3)) < 1e-13


def test_double_contour_nested_circles():
    # w circle outside the z circle: the z = w pole only counts for the w integral
    f = lambda z, w: 1.0 / (z * (w - z) * w)
    fixed = double_contour_integral(f, 0.5, 1.0, 64, 64)
    adaptive = nested_circle_integral(f, (0, 0.5), (0, 1.0))
    assert abs(fixed) < 1e-14 and abs(adaptive) < 1e-14
    g = lambda z, w: 1.0 / (z * (w - z))
    assert abs(nested_circle_integral(g, (0, 0.5), (0, 1.0)) - 1.0) < 1e-12


def test_fourier_coefficients_of_laurent_polynomial():
    g = circle_grid(0.8, 64)
    vals = 3 / g.nodes**2 + 1 + 2 * g.nodes**3
    c = fourier_coefficients(vals, 0.8, -3, 4)
    expected = np.array([0, 3, 0, 1, 0, 0, 2, 0])
    assert np.max(np.abs(c - expected)) < 1e-12


def test_until_stable_reports_nodes_and_difference():
    val, n, diff = until_stable(lambda m: 1.0 + 2.0**-m, 8, 1e-6)
    assert n == 64 and diff <= 1e-6 and abs(val - 1) < 1e-9


def test_until_stable_raises_when_oscillating():
    with pytest.raises(NonConvergenceError):
        until_stable(lambda m: (-1) ** m.bit_length(), 8, 1e-6, max_doublings=3)
