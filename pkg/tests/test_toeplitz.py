import numpy as np
import pytest

from dimerdpp.models.aztec import AztecEnsembleSpec, aztec_ground_set, aztec_kernel
from dimerdpp.toeplitz import (
    FourierCoefficientTable,
    LevelSymbols,
    SymbolSpec,
    borodin_okounkov,
    finite_m_kernel,
    finite_toeplitz_bilinear,
    finite_toeplitz_kernel,
    fourier_coefficient,
    infinite_toeplitz_kernel,
    random_symbol,
    toeplitz_det,
    toeplitz_matrix,
)


def aztec_levels(n, a):
    up = SymbolSpec(((-a, 1),), ())  # 1 + a z
    down = SymbolSpec((), ((a, -1),))  # 1 / (1 - a / z)
    return LevelSymbols([up if r % 2 == 0 else down for r in range(2 * n)], L=0, d=1)


def test_wiener_hopf_split():
    rng = np.random.default_rng(0)
    for _ in range(20):
        sym = random_symbol(rng)
        assert sym.factorization_error(256) <= 1e-12
        assert abs(sym.plus_part(0.0) - 1) < 1e-15
        assert abs(sym.minus_part(1e15) - 1) < 1e-12


def test_factors_must_be_inside_disc():
    with pytest.raises(ValueError):
        SymbolSpec(((1.5, 1),), ())


def test_fourier_coefficient_examples():
    one = SymbolSpec()
    assert abs(fourier_coefficient(one, 0) - 1) < 1e-14
    assert abs(fourier_coefficient(one, 3)) < 1e-14
    a = 0.4
    lin = SymbolSpec(((-a, 1),), ())
    assert abs(fourier_coefficient(lin, 0) - 1) < 1e-14
    assert abs(fourier_coefficient(lin, 1) - a) < 1e-14
    assert abs(fourier_coefficient(lin, 2)) < 1e-14
    geo = SymbolSpec((), ((a, -1),))
    for k in range(6):
        assert abs(fourier_coefficient(geo, -k) - a**k) < 1e-12
    tab = FourierCoefficientTable(geo, kmax=20)
    assert np.allclose(tab.coefficients(-5, 0), a ** np.arange(5, -1, -1), atol=1e-15)
    assert tab.check_decay()


def test_trivial_symbols_leave_only_pinned_particles():
    lev = LevelSymbols([SymbolSpec()] * 3, L=0, d=0)
    K = infinite_toeplitz_kernel(lev, radii=(0.9, 1.1))
    for u in range(-3, 3):
        assert abs(K((1, u), (1, u)) - (1 if u < 0 else 0)) < 1e-12


def test_infinite_kernel_matches_aztec_contour_form():
    n, a = 3, 0.5
    Ki = infinite_toeplitz_kernel(aztec_levels(n, a))
    Ka = aztec_kernel(AztecEnsembleSpec(n, a))
    pts = aztec_ground_set(n)
    assert max(abs(Ki(x, y) - Ka(x, y)) for x in pts[::3] for y in pts[::4]) < 1e-10


def test_infinite_kernel_radius_independence():
    lev = aztec_levels(2, 0.5)
    K1 = infinite_toeplitz_kernel(lev, radii=(0.7, 1.2))
    K2 = infinite_toeplitz_kernel(lev, radii=(0.9, 1.4))
    pts = aztec_ground_set(2)
    assert max(abs(K1(x, y) - K2(x, y)) for x in pts for y in pts) < 1e-10
    with pytest.raises(ValueError):
        infinite_toeplitz_kernel(lev, radii=(1.2, 0.9))


def test_bilinear_single_entry():
    c = 2.5
    lhs, rhs = finite_toeplitz_bilinear(lambda z: c * np.ones_like(z), 1, 0.3 + 0.1j, 1.7)
    expected = (0.3 + 0.1j) / (c * 1.7)
    assert abs(lhs - expected) < 1e-14 and abs(rhs - expected) < 1e-14


def test_bilinear_identity_random_symbols():
    rng = np.random.default_rng(1)
    for _ in range(10):
        f = random_symbol(rng, rmax=0.6)
        lhs, rhs = finite_toeplitz_bilinear(f, 3, complex(*rng.normal(size=2)), complex(*rng.normal(size=2)) + 0.5)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_bilinear_converges_to_wiener_hopf_limit():
    f = SymbolSpec(((0.3, 1), (-0.2 + 0.1j, 1)), ((0.25, 1),))
    z, w = 0.4 + 0.2j, 1.8 - 0.3j
    limit = z / (w - z) / (f.plus_part(z) * f.minus_part(w))
    errs = [abs(finite_toeplitz_bilinear(f, n, z, w)[0] - limit) for n in (10, 20, 40)]
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-12
    assert errs[2] < 1e-8


def test_borodin_okounkov_trivial_symbol():
    lhs, rhs = borodin_okounkov(SymbolSpec(), 5)
    assert abs(lhs - 1) < 1e-14 and abs(rhs - 1) < 1e-14


def test_borodin_okounkov_against_tridiagonal_determinant():
    a = b = 1 / 3
    g = SymbolSpec(((-a, 1),), ((-b, 1),))  # (1 + a z)(1 + b / z)
    T = np.diag([1 + a * b] * 6) + np.diag([a] * 5, -1) + np.diag([b] * 5, 1)
    lhs, rhs = borodin_okounkov(g, 6)
    assert abs(lhs - np.linalg.det(T)) < 1e-12
    assert abs(lhs - rhs) < 1e-10


def test_borodin_okounkov_fredholm_part_tends_to_one():
    g = SymbolSpec(((0.5, 1), (0.3j, 2)), ((0.6, 1),))
    dev = []
    for n in (1, 2, 4, 8, 16):
        lhs, rhs = borodin_okounkov(g, n)
        assert abs(lhs - rhs) <= 1e-9 * abs(lhs)
        dev.append(abs(rhs / np.exp(g.G()) - 1))
    assert all(y < x for x, y in zip(dev, dev[1:]))


def test_borodin_okounkov_random_symbols():
    rng = np.random.default_rng(2)
    for _ in range(50):
        g = random_symbol(rng)
        n = int(rng.integers(1, 21))
        lhs, rhs = borodin_okounkov(g, n)
        assert abs(lhs - rhs) <= 1e-9 * abs(lhs)


def test_toeplitz_inverse_factorises_asymptotically():
    f = SymbolSpec(((0.5, 1),), ((0.4, 1), (-0.3, 2)))
    errs = []
    for N in (8, 16, 32):
        approx = toeplitz_matrix(f.plus_only().inverse(), N) @ toeplitz_matrix(f.minus_only().inverse(), N)
        diff = approx - np.linalg.inv(toeplitz_matrix(f, N))
        # the bottom-right corner never converges; the leading block does
        errs.append(np.linalg.norm(diff[: N // 2, : N // 2], 2))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-10


def test_toeplitz_det_of_identity_symbol():
    assert toeplitz_det(SymbolSpec(), 0) == 1
    assert abs(toeplitz_det(SymbolSpec(), 4) - 1) < 1e-14


def test_finite_m_kernel_routes_and_limit():
    lev = aztec_levels(3, 0.5)
    pts = aztec_ground_set(3)
    for M in (2, 5):
        Kf = finite_toeplitz_kernel(lev, M)
        Km = finite_m_kernel(lev, M)
        Kd = finite_m_kernel(lev, M, dual=True)
        assert max(abs(Kf(x, y) - Km(x, y)) for x in pts for y in pts) < 1e-10
        assert max(abs(Km(x, y) + Kd(x, y) - (x == y)) for x in pts for y in pts) < 1e-10
    Ki = infinite_toeplitz_kernel(lev)
    K40 = finite_m_kernel(lev, 40)
    assert max(abs(K40(x, y) - Ki(x, y)) for x in pts[::3] for y in pts[::4]) < 1e-8
