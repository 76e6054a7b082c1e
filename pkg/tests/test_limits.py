import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import airy

from dimerdpp.limits import (
    AIRY_WINDOW,
    DEFAULT_CONTOURS,
    GasKernel,
    ScalingWindow,
    airy_edge_coordinates,
    airy_function,
    airy_kernel,
    aztec_edge_kernel,
    cusp_airy_kernel,
    extended_airy_kernel,
    gas_decay_rate,
    gue_minor_kernel,
    heat_term,
    pearcey_kernel,
    tacnode_kernel,
    tracy_widom_f2,
)
from dimerdpp.models.aztec import AztecEnsembleSpec, aztec_kernel


def test_airy_matches_reference_library():
    xs = np.array([-8.0, -5.0, -1.0, 0.0, 0.7, 3.0, 6.0])
    ai, aip, _, _ = airy(xs)
    assert np.max(np.abs(airy_function(xs) - ai)) < 1e-12
    assert np.max(np.abs(airy_function(xs, 1) - aip)) < 1e-12


def test_airy_values_at_zero_and_ode():
    assert airy_function(0.0) == pytest.approx(1 / (3 ** (2 / 3) * math.gamma(2 / 3)), rel=1e-13)
    assert airy_function(0.0, 1) == pytest.approx(-1 / (3 ** (1 / 3) * math.gamma(1 / 3)), rel=1e-13)
    h = 1e-3
    for x in (-3.0, -0.5, 1.5):
        second = (airy_function(x + h, 1) - airy_function(x - h, 1)) / (2 * h)
        assert abs(second - x * airy_function(x)) < 1e-6


def test_airy_decays_superexponentially():
    for x in (4.0, 8.0):
        bound = math.exp(-2 / 3 * x**1.5) / (2 * math.sqrt(math.pi) * x**0.25)
        assert 0.9 * bound < airy_function(x) <= bound


def test_airy_kernel_symmetric_with_known_diagonal():
    for x, y in ((0.3, -1.2), (2.0, 0.5)):
        assert airy_kernel(x, y) == pytest.approx(airy_kernel(y, x), abs=1e-14)
    for x in (-2.0, 0.0, 1.3):
        ai, aip = airy_function(x), airy_function(x, 1)
        assert airy_kernel(x, x) == pytest.approx(aip**2 - x * ai**2, abs=1e-12)
    # continuity across the near-diagonal switch
    assert abs(airy_kernel(0.5, 0.5 + 0.049) - airy_kernel(0.5, 0.5 + 0.051)) < 1e-3


def test_extended_airy_equal_times_is_airy_kernel():
    for x, y in ((0.5, -0.2), (-1.0, 1.0)):
        for r in (-0.4, 0.3):
            assert extended_airy_kernel(r, x, r, y) == pytest.approx(airy_kernel(x, y), abs=1e-12)


@pytest.mark.parametrize("r1,r2", [(0.1, 0.6), (0.6, 0.1), (-0.3, 0.4)])
def test_extended_airy_routes_agree(r1, r2):
    for x1, x2 in ((0.5, -0.2), (-1.0, 0.8)):
        a = extended_airy_kernel(r1, x1, r2, x2, route="lambda")
        b = extended_airy_kernel(r1, x1, r2, x2, route="contour")
        assert abs(a - b) < 1e-10


def test_extended_airy_rejects_unknown_route():
    with pytest.raises(ValueError):
        extended_airy_kernel(0, 0, 0, 0, route="series")


def test_heat_term_only_forward_in_time():
    assert heat_term(0.5, 0.0, 0.2, 0.0) == 0.0
    assert heat_term(0.2, 0.0, 0.2, 0.0) == 0.0
    assert heat_term(0.0, 0.0, 1.0, 0.0) > 0


def test_tracy_widom_reference_values():
    # F2(-2) from the Painleve II tables
    assert tracy_widom_f2(-2.0) == pytest.approx(0.41322414250512257, abs=1e-9)
    assert tracy_widom_f2(-8.0) < 1e-8
    assert abs(tracy_widom_f2(6.0) - 1) < 1e-8


def test_pearcey_reflection_symmetry():
    for r1, x1, r2, x2 in ((0.2, 0.7, 0.5, -0.3), (0.0, 1.5, 0.0, 0.4), (0.6, -0.2, 0.1, 1.0)):
        assert pearcey_kernel(r1, x1, r2, x2) == pytest.approx(pearcey_kernel(r1, -x1, r2, -x2), abs=1e-12)


def test_pearcey_refinement_is_stable_and_density_positive():
    fine = pearcey_kernel(0.2, 0.7, 0.5, -0.3, contours=DEFAULT_CONTOURS.refined())
    assert abs(fine - pearcey_kernel(0.2, 0.7, 0.5, -0.3)) < 1e-10
    for x in (0.0, 2.0, 5.0):
        assert pearcey_kernel(0.0, x, 0.0, x) > 0


def test_tacnode_symmetric_curvatures_reflection():
    a = tacnode_kernel(1.0, 1.0, 0.2, 0.7, 0.2, 0.7)
    b = tacnode_kernel(1.0, 1.0, 0.2, -0.7, 0.2, -0.7)
    assert a == pytest.approx(b, abs=1e-12)
    assert a > 0


def test_tacnode_large_pressure_drops_resolvent():
    with_res = tacnode_kernel(1.0, 8.0, 0.2, 0.7, 0.5, 0.1)
    without = tacnode_kernel(1.0, 8.0, 0.2, 0.7, 0.5, 0.1, resolvent=False)
    assert abs(with_res - without) < 1e-8


def test_tacnode_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        tacnode_kernel(0.0, 1.0, 0, 0, 0, 0)


@pytest.mark.parametrize("r", [1, 2])
def test_gue_minor_line_holds_r_particles(r):
    total, _ = quad(lambda x: gue_minor_kernel(r, x, r, x), -8, 8, limit=200)
    assert total == pytest.approx(r, abs=1e-7)


def test_gue_minor_first_line_is_gaussian():
    for x in (-1.0, 0.0, 0.8):
        assert gue_minor_kernel(1, x, 1, x) == pytest.approx(math.exp(-x * x) / math.sqrt(math.pi), abs=1e-10)


def test_cusp_density_symmetry_and_decay():
    assert cusp_airy_kernel(1, 0.3, 1, 0.3) == pytest.approx(cusp_airy_kernel(-1, 0.3, -1, 0.3), abs=1e-12)
    tail = [cusp_airy_kernel(0, x, 0, x) for x in (0.0, 3.0, 6.0)]
    assert tail[0] > tail[1] > tail[2] > 0
    assert tail[2] < 1e-9


def test_cusp_validates_contours():
    with pytest.raises(ValueError):
        cusp_airy_kernel(0, 0, 0, 0, rho1=1.0, rho2=0.5)


def test_gas_kernel_radius_independence():
    G, H = GasKernel(0.5), GasKernel(0.5, 1.1, 0.95)
    for w, b in (((3, 0), (0, 1)), ((1, 2), (2, 1)), ((5, 4), (0, 1))):
        assert abs(G(w, b) - H(w, b)) < 1e-12


def test_gas_kernel_decays_and_checks_colours():
    assert gas_decay_rate(0.5) > 0.3
    assert gas_decay_rate(0.25) > gas_decay_rate(0.5)
    with pytest.raises(ValueError):
        GasKernel(0.5)((0, 1), (3, 0))


@pytest.mark.parametrize("x,y", [((41, 18), (41, 20)), ((40, 18), (42, 17)), ((42, 19), (40, 18))])
def test_edge_kernel_matches_exact_kernel(x, y):
    n = 24
    K = aztec_kernel(AztecEnsembleSpec(n, 1.0))
    assert abs(aztec_edge_kernel(n, x, y) - K(x, y).real) < 1e-9


def test_scaling_window():
    with pytest.raises(ValueError):
        ScalingWindow(1, 1, 1, 1, 1.0, 0.5)
    n = 1000
    R, u = AIRY_WINDOW.point(n, 0.0, 0.0)
    assert R == math.floor(AIRY_WINDOW.c * n) and u == math.floor(AIRY_WINDOW.d * n)
    assert AIRY_WINDOW.jacobian(n) == pytest.approx(2 ** (-5 / 6) * 10)
    rho, xi = airy_edge_coordinates(n, (R, u))
    assert abs(rho) < 0.1 and abs(xi) < 0.5


def test_pearcey_equal_time_matrix_is_a_contraction():
    # not symmetric, but gap probabilities need the spectrum inside (0, 1)
    xs = np.linspace(-2, 2, 5)
    M = np.array([[pearcey_kernel(0.0, x, 0.0, y) for y in xs] for x in xs])
    ev = np.linalg.eigvals(M)
    assert np.all(np.abs(ev.imag) < 1e-10) and np.all((ev.real > 0) & (ev.real < 1))


def test_tacnode_grid_doubling():
    a = tacnode_kernel(0.5, 0.5, 0.1, 0.4, 0.3, -0.2, nodes=48)
    b = tacnode_kernel(0.5, 0.5, 0.1, 0.4, 0.3, -0.2, nodes=96)
    assert abs(a - b) < 1e-8


def test_gue_minor_line_independence():
    for args in ((2, 0.3, 1, -0.4), (1, 0.5, 3, 0.1)):
        assert gue_minor_kernel(*args, line=1.0) == pytest.approx(gue_minor_kernel(*args, line=2.0), abs=1e-10)


def test_cusp_contour_independence():
    for args in ((1, 0.2, 0, -0.3), (-1, 0.4, 2, 0.4), (0, 0.1, 0, 0.1)):
        base = cusp_airy_kernel(*args)
        assert abs(cusp_airy_kernel(*args, x=2.2, y=-1.8, rho1=0.3, rho2=1.2) - base) < 1e-10
        assert abs(cusp_airy_kernel(*args, contours=DEFAULT_CONTOURS.refined()) - base) < 1e-10
