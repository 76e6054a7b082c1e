"""Rational symbols with a Wiener-Hopf split, Toeplitz determinants and the
Toeplitz-type kernels of product measures with x_j = d - j boundary points.

A symbol is a product of factors (1 - alpha z)^m with |alpha| < 1 (the plus
part, analytic and nonzero in a disc of radius > 1, equal to 1 at 0) and
(1 - beta/z)^m with |beta| < 1 (the minus part, equal to 1 at infinity).
Fourier coefficients phi^(k) are the Laurent coefficients of phi on the unit
circle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dpp import KernelEvaluator
from .quadrature import NonConvergenceError, circle_grid, nested_circle_integral, until_stable

__all__ = [
    "SymbolSpec",
    "FourierCoefficientTable",
    "ToeplitzOperator",
    "fourier_coefficient",
    "toeplitz_matrix",
    "toeplitz_det",
    "finite_toeplitz_bilinear",
    "borodin_okounkov",
    "infinite_toeplitz_kernel",
    "finite_toeplitz_kernel",
    "finite_m_kernel",
    "LevelSymbols",
    "random_symbol",
]


def _clean(factors) -> tuple:
    acc: dict = {}
    for c, m in factors:
        if m == 0 or c == 0:
            continue
        acc[complex(c)] = acc.get(complex(c), 0) + int(m)
    return tuple((c, m) for c, m in acc.items() if m != 0)


@dataclass(frozen=True)
class SymbolSpec:
    """phi(z) = prod (1 - alpha z)^m  *  prod (1 - beta / z)^m."""

    plus: tuple = ()
    minus: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "plus", _clean(self.plus))
        object.__setattr__(self, "minus", _clean(self.minus))
        for c, _ in self.plus + self.minus:
            if abs(c) >= 1:
                raise ValueError(f"factor parameter {c} is not inside the unit disc")

    @property
    def epsilon(self) -> float:
        """Half-width of the annulus around the unit circle where both parts are
        analytic and nonzero."""
        eps = [1 / abs(c) - 1 for c, _ in self.plus] + [1 - abs(c) for c, _ in self.minus]
        return min(eps) if eps else 1.0

    @property
    def decay(self) -> float:
        """Largest |alpha|, |beta|: coefficients decay like decay^|k|."""
        return max([abs(c) for c, _ in self.plus + self.minus], default=0.0)

    def plus_part(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for c, m in self.plus:
            out = out * (1 - c * z) ** m
        return out

    def minus_part(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for c, m in self.minus:
            out = out * (1 - c / z) ** m
        return out

    def __call__(self, z):
        return self.plus_part(z) * self.minus_part(z)

    def __mul__(self, other: "SymbolSpec") -> "SymbolSpec":
        return SymbolSpec(self.plus + other.plus, self.minus + other.minus)

    def inverse(self) -> "SymbolSpec":
        return SymbolSpec(tuple((c, -m) for c, m in self.plus), tuple((c, -m) for c, m in self.minus))

    def plus_only(self) -> "SymbolSpec":
        return SymbolSpec(self.plus, ())

    def minus_only(self) -> "SymbolSpec":
        return SymbolSpec((), self.minus)

    def minus_over_plus(self) -> "SymbolSpec":
        return SymbolSpec(tuple((c, -m) for c, m in self.plus), self.minus)

    def plus_over_minus(self) -> "SymbolSpec":
        return SymbolSpec(self.plus, tuple((c, -m) for c, m in self.minus))

    def factorization_error(self, samples: int = 256) -> float:
        """max |phi+ phi- - phi| / max |phi| on the unit circle, with phi
        evaluated as one rational function."""
        z = circle_grid(1.0, samples).nodes
        num = np.ones_like(z)
        den = np.ones_like(z)
        for c, m in self.plus:
            (num if m > 0 else den)[:] *= (1 - c * z) ** abs(m)
        for c, m in self.minus:
            (num if m > 0 else den)[:] *= ((z - c) / z) ** abs(m)
        phi = num / den
        return float(np.max(np.abs(self.plus_part(z) * self.minus_part(z) - phi)) / np.max(np.abs(phi)))

    def log_coefficient(self, k: int) -> complex:
        """Fourier coefficient of log phi (exact series)."""
        if k > 0:
            return -sum(m * c**k for c, m in self.plus) / k
        if k < 0:
            j = -k
            return -sum(m * c**j for c, m in self.minus) / j
        return 0j

    def G(self) -> complex:
        """sum_{j>=1} j (log phi)^_j (log phi)^_{-j} in closed form."""
        return -sum(m1 * m2 * cmath.log(1 - a * b) for a, m1 in self.plus for b, m2 in self.minus)

    def to_json(self) -> dict:
        enc = lambda fs: [[[c.real, c.imag], m] for c, m in fs]  # noqa: E731
        return {"plus": enc(self.plus), "minus": enc(self.minus)}

    @classmethod
    def from_json(cls, data: dict) -> "SymbolSpec":
        dec = lambda fs: tuple((complex(*c) if isinstance(c, list) else complex(c), int(m)) for c, m in fs)  # noqa: E731
        return cls(dec(data.get("plus", [])), dec(data.get("minus", [])))


def random_symbol(rng: np.random.Generator, n_plus: int = 2, n_minus: int = 2, rmax: float = 0.8,
                  complex_params: bool = True) -> SymbolSpec:
    """Random rational symbol with zeros/poles at distance >= 1 - rmax from the circle's inside
    (and correspondingly outside)."""

    def param():
        r = rmax * math.sqrt(rng.uniform(0.0, 1.0))
        t = rng.uniform(0, 2 * math.pi) if complex_params else (0 if rng.uniform() < 0.5 else math.pi)
        return r * cmath.exp(1j * t)

    plus = tuple((param(), int(rng.choice([-1, 1, 2]))) for _ in range(n_plus))
    minus = tuple((param(), int(rng.choice([-1, 1, 2]))) for _ in range(n_minus))
    return SymbolSpec(plus, minus)


def _fft_size(decay: float, kmax: int, tol: float = 1e-17) -> int:
    if decay <= 0:
        tail = 8
    else:
        tail = int(math.ceil(math.log(tol) / math.log(decay)))
    n = 256
    while n < 2 * (kmax + tail) + 16:
        n *= 2
    return n


class FourierCoefficientTable:
    """Fourier coefficients of a symbol by one FFT on the unit circle.

    The node count is chosen from the coefficient decay so that aliasing is
    below ~1e-17 relative for indices |k| <= kmax.
    """

    def __init__(self, symbol: SymbolSpec | Callable, kmax: int = 64, decay: float | None = None):
        self.symbol = symbol
        self.kmax = int(kmax)
        if decay is None:
            decay = symbol.decay if isinstance(symbol, SymbolSpec) else 0.9
        self.decay = decay
        self.n = _fft_size(decay, self.kmax)
        z = circle_grid(1.0, self.n).nodes
        self._spec = np.fft.fft(np.asarray(symbol(z), dtype=complex)) / self.n

    def __call__(self, k):
        k = np.asarray(k)
        if np.any(np.abs(k) > self.n // 2 - 8):
            raise IndexError(f"coefficient index beyond table range {self.n // 2 - 8}")
        return self._spec[k % self.n]

    def coefficients(self, kmin: int, kmax: int) -> np.ndarray:
        return self(np.arange(kmin, kmax + 1))

    def check_decay(self) -> bool:
        """|c_k| <= C rho^|k| for some rho < 1 over the stored range."""
        ks = np.arange(1, self.kmax + 1)
        mags = np.abs(self(ks)) + np.abs(self(-ks))
        if self.decay == 0:
            return True
        rho = (1 + self.decay) / 2
        C = max(1.0, float(np.max(mags / rho**ks)))
        return bool(np.all(mags <= C * rho**ks * (1 + 1e-12)))


def fourier_coefficient(sym: SymbolSpec | Callable, k: int, tol: float = 1e-12, start: int = 64) -> complex:
    """(1/2 pi i) int z^{-k} phi(z) dz/z over the unit circle, trapezoid rule with doubling."""

    def ev(n):
        z = circle_grid(1.0, n).nodes
        return complex(np.mean(np.asarray(sym(z), dtype=complex) * z ** (-k)))

    return until_stable(ev, max(start, 4 * abs(k) + 8), tol, max_doublings=12)[0]


@dataclass
class ToeplitzOperator:
    symbol: SymbolSpec | Callable
    size: int

    def matrix(self) -> np.ndarray:
        return toeplitz_matrix(self.symbol, self.size)


def toeplitz_matrix(sym, n: int, coeff: Callable | None = None) -> np.ndarray:
    """T_n(phi) with entries phi^(j - k), 1 <= j, k <= n."""
    if coeff is None:
        coeff = FourierCoefficientTable(sym, kmax=n + 1)
    ks = np.arange(-(n - 1), n)
    c = dict(zip(ks.tolist(), coeff(ks)))
    return np.array([[c[j - k] for k in range(n)] for j in range(n)], dtype=complex)


def toeplitz_det(sym, n: int, coeff: Callable | None = None) -> complex:
    if n == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(toeplitz_matrix(sym, n, coeff)))


def finite_toeplitz_bilinear(f, n: int, z: complex, w: complex) -> tuple[complex, complex]:
    """Both sides of sum_{i,j} z^j T_n(f)^{-1}_{ji} w^{-i} = (z/w) D_{n-1}[(1 - t/w)(1 - z/t) f] / D_n[f].

    Returns (direct inverse side, determinant ratio side).  ``f`` is a
    SymbolSpec or a callable on the unit circle.
    """
    if n < 1:
        raise ValueError("n must be positive")
    tab = FourierCoefficientTable(f, kmax=n + 2)
    T = toeplitz_matrix(f, n, tab)
    if abs(np.linalg.det(T)) < 1e-300 or np.linalg.cond(T) > 1e14:
        raise ValueError("T_n(f) is singular")
    zs = np.array([z**j for j in range(1, n + 1)])
    ws = np.array([w ** (-i) for i in range(1, n + 1)])
    lhs = complex(zs @ np.linalg.solve(T, ws))

    # (1 - t/w)(1 - z/t) f has coefficients (1 + z/w) c_k - c_{k-1}/w - z c_{k+1}
    def hc(k):
        k = np.asarray(k)
        return (1 + z / w) * tab(k) - tab(k - 1) / w - z * tab(k + 1)

    num = toeplitz_det(None, n - 1, hc)
    rhs = complex(z / w * num / toeplitz_det(None, n, tab))
    return lhs, rhs


def _tail_length(decay: float, tol: float = 1e-14, safety: float = 2.0) -> int:
    if decay <= 0:
        return 4
    return int(math.ceil(safety * math.log(tol) / math.log(decay))) + 4


def borodin_okounkov(g: SymbolSpec, n: int) -> tuple[complex, complex]:
    """(D_n[g], e^G det(I - K) on l^2({n+1, n+2, ...})), with
    K(j, k) = sum_{l>=0} (g-/g+)^_{j+l} (g+/g-)^_{-k-l}."""
    if not isinstance(g, SymbolSpec):
        raise ValueError("the identity needs a symbol with an explicit Wiener-Hopf split")
    T = _tail_length(g.decay)
    lo, hi = n + 1, n + 1 + T
    b = FourierCoefficientTable(g.minus_over_plus(), kmax=hi + T + 2)
    c = FourierCoefficientTable(g.plus_over_minus(), kmax=hi + T + 2)
    js = np.arange(lo, hi + 1)
    ls = np.arange(0, T + 1)
    B = b(js[:, None] + ls[None, :])  # (j, l)
    C = c(-(js[None, :] + ls[:, None]))  # (l, k)
    K = B @ C
    fred = complex(np.linalg.det(np.eye(len(js)) - K))
    lhs = toeplitz_det(g, n, FourierCoefficientTable(g, kmax=n + 2))
    return lhs, complex(cmath.exp(g.G()) * fred)


@dataclass
class LevelSymbols:
    """Per-level symbols phi_r, r = L..R-1, with boundary points x_j = d - j."""

    phis: Sequence[SymbolSpec]
    L: int = 0
    d: int = 0

    @property
    def R(self) -> int:
        return self.L + len(self.phis)

    def product(self, r: int, s: int) -> SymbolSpec:
        out = SymbolSpec()
        for t in range(r, s):
            out = out * self.phis[t - self.L]
        return out

    def plus(self, r: int, s: int) -> SymbolSpec:
        return self.product(r, s).plus_only()

    def minus(self, r: int, s: int) -> SymbolSpec:
        return self.product(r, s).minus_only()

    @property
    def epsilon(self) -> float:
        return min((p.epsilon for p in self.phis), default=1.0)

    @property
    def decay(self) -> float:
        return max((p.decay for p in self.phis), default=0.0)

    def check_point(self, r: int) -> None:
        if not self.L < r < self.R:
            raise ValueError(f"line {r} is not strictly between {self.L} and {self.R}")


def infinite_toeplitz_kernel(levels: LevelSymbols, radii: tuple[float, float] | None = None,
                             tol: float = 1e-12) -> KernelEvaluator:
    """K_{L,R}(r,u;s,v) by nested trapezoid quadrature on |z| = rho1 < |w| = rho2."""
    eps = levels.epsilon
    if radii is None:
        radii = (1 - eps / 3, 1 + eps / 3)
    r1, r2 = radii
    if not (1 - eps < r1 < r2 < 1 + eps):
        raise ValueError(f"need 1-eps < rho1 < rho2 < 1+eps with eps = {eps}")
    d, L, R = levels.d, levels.L, levels.R
    single: dict = {}

    def K(x, y):
        (r, u), (s, v) = x, y
        levels.check_point(r)
        levels.check_point(s)
        val = 0j
        if r < s:
            key = (r, s)
            if key not in single:
                sym = levels.product(r, s)
                single[key] = FourierCoefficientTable(sym, kmax=64)
            val -= complex(single[key](v - u))
        num_z = levels.minus(r, R)
        den_z = levels.plus(L, r)
        num_w = levels.plus(L, s)
        den_w = levels.minus(s, R)

        def f(z, w):
            return (
                z ** (u - d) / (w ** (v - d + 1) * (w - z))
                * num_z(z) * num_w(w) / (den_w(w) * den_z(z))
            )

        return val + nested_circle_integral(f, (0, r1), (0, r2), tol=tol, max_doublings=6)

    return KernelEvaluator(K, name="infinite-toeplitz", d=d, L=L, R=R, radii=radii)


def finite_toeplitz_kernel(levels: LevelSymbols, M: int) -> KernelEvaluator:
    """K = -p_{r,s} + sum_{i,j<=M} phi_{r,R}^(d-j-u) T_M(phi_{L,R})^{-1}_{ji} phi_{L,s}^(v+i-d),
    straight from the finite Toeplitz inverse."""
    d, L, R = levels.d, levels.L, levels.R
    big = levels.product(L, R)
    Tinv = np.linalg.inv(toeplitz_matrix(big, M, FourierCoefficientTable(big, kmax=M + 2)))
    tabs: dict = {}

    def tab(r, s):
        if (r, s) not in tabs:
            tabs[(r, s)] = FourierCoefficientTable(levels.product(r, s), kmax=M + 128)
        return tabs[(r, s)]

    idx = np.arange(1, M + 1)

    def K(x, y):
        (r, u), (s, v) = x, y
        levels.check_point(r)
        levels.check_point(s)
        left = tab(r, R)(d - idx - u)  # over j
        right = tab(L, s)(v + idx - d)  # over i
        val = complex(left @ Tinv @ right)
        if r < s:
            val -= complex(tab(r, s)(v - u))
        return val

    return KernelEvaluator(K, name="finite-toeplitz", d=d, L=L, R=R, M=M)


@dataclass
class _ResolventData:
    M: int
    T: int
    A: FourierCoefficientTable
    B: FourierCoefficientTable
    K0: np.ndarray
    lu: tuple = field(default=None)


def finite_m_kernel(levels: LevelSymbols, M: int, dual: bool = False, tail_tol: float = 1e-14) -> KernelEvaluator:
    """Kernel of the M-path Toeplitz ensemble through the resolvent of K_0 on
    l^2({M, M+1, ...}).

    All contour integrals are evaluated through the Laurent expansions of
    1/(zeta - omega) etc. on the ordered circles, which turns every double
    integral into a sum of products of Fourier coefficients of
    A = phi-_{L,R}/phi+_{L,R}, B = 1/A, E_r = phi-_{r,R}/phi+_{L,r},
    C_s = phi+_{L,s}/phi-_{s,R}.  With ``dual`` the kernel of the holes is
    returned.

    The resolvent term enters K with a plus sign and K* with a minus sign,
    checked against the direct finite Toeplitz inverse.
    """
    import scipy.linalg as sla

    d, L, R = levels.d, levels.L, levels.R
    big = levels.product(L, R)
    rho = levels.decay
    T = _tail_length(rho, tail_tol)
    kmax = M + 4 * T + 64
    A = FourierCoefficientTable(big.minus_over_plus(), kmax=kmax, decay=rho)
    B = FourierCoefficientTable(big.plus_over_minus(), kmax=kmax, decay=rho)
    ks = np.arange(M, M + T + 1)
    ls = np.arange(0, T + 1)
    # K0(j,k) = sum_l A^(j+l+1) B^(-k-l-1)
    K0 = A(ks[:, None] + ls[None, :] + 1) @ B(-(ks[None, :] + ls[:, None] + 1))
    I_K0 = np.eye(len(ks)) - K0
    lu = sla.lu_factor(I_K0)
    if not np.all(np.isfinite(lu[0])):
        raise NonConvergenceError("resolvent of K_0 could not be formed", None, None)
    E_tabs: dict = {}
    C_tabs: dict = {}
    single: dict = {}

    def E(r):
        if r not in E_tabs:
            sym = levels.minus(r, R) * levels.plus(L, r).inverse()
            E_tabs[r] = FourierCoefficientTable(sym, kmax=kmax + 64, decay=rho)
        return E_tabs[r]

    def C(s):
        if s not in C_tabs:
            sym = levels.plus(L, s) * levels.minus(s, R).inverse()
            C_tabs[s] = FourierCoefficientTable(sym, kmax=kmax + 64, decay=rho)
        return C_tabs[s]

    def sym_coeff(key, sym, k):
        if key not in single:
            single[key] = FourierCoefficientTable(sym, kmax=64, decay=rho)
        return complex(single[key](k))

    def a_vec(s, v):
        # a(j) = -sum_l A^(j-l) C_s^(v-d+l+1)
        lj = np.arange(0, M + 2 * T + 1)
        return -(A(ks[:, None] - lj[None, :]) @ C(s)(v - d + lj + 1))

    def b_vec(r, u):
        # b(k) = sum_l E_r^(d-u-l-1) B^(l-k)
        lk = np.arange(0, M + 2 * T + 1)
        return B(lk[None, :] - ks[:, None]) @ E(r)(d - u - lk - 1)

    def span(u, v):
        return abs(d - u) + abs(v - d) + 2 * T + 2

    def M_plus(r, u, s, v):
        ls_ = np.arange(0, span(u, v))
        return complex(np.sum(E(r)(d - u - ls_ - 1) * C(s)(v - d + ls_ + 1)))

    def M_star(r, u, s, v):
        ls_ = np.arange(0, span(u, v))
        return complex(np.sum(E(r)(d - u + ls_) * C(s)(v - d - ls_)))

    def correction(r, u, s, v):
        x = sla.lu_solve(lu, a_vec(s, v))
        return complex(x @ b_vec(r, u))

    def K(x, y):
        (r, u), (s, v) = x, y
        levels.check_point(r)
        levels.check_point(s)
        if not dual:
            val = M_plus(r, u, s, v) + correction(r, u, s, v)
            if r < s:
                val -= sym_coeff(("p", r, s), levels.product(r, s), v - u)
            return val
        val = M_star(r, u, s, v) - correction(r, u, s, v)
        if s < r:
            val -= sym_coeff(("q", s, r), levels.product(s, r).inverse(), v - u)
        return val

    ev = KernelEvaluator(K, name="finite-m-dual" if dual else "finite-m", d=d, L=L, R=R, M=M, tail=T)
    ev.parts = {"M": M_plus, "Mstar": M_star, "correction": correction, "K0": K0}
    return ev
