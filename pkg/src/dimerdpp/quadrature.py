"""Quadrature grids on circles, intervals and rays.

Circle rules are the periodic trapezoid rule, which converges geometrically for
integrands analytic in an annulus around the circle.  Interval rules are
Gauss-Legendre.  Both come with a resolution-doubling driver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureGrid",
    "NonConvergenceError",
    "circle_grid",
    "interval_grid",
    "ray_grid",
    "contour_integral",
    "double_contour_integral",
    "fourier_coefficients",
    "until_stable",
    "nested_circle_integral",
    "circle_integral",
]


class NonConvergenceError(ArithmeticError):
    """Raised when resolution doubling does not reach the requested tolerance."""

    def __init__(self, message: str, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and weights so that sum(w * f(nodes)) approximates an integral.

    For contours the weights already contain dz, so the sum approximates
    the complex line integral of f.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "interval"

    def integrate(self, values) -> complex:
        return np.sum(self.weights * values)

    def __len__(self) -> int:
        return len(self.nodes)


def circle_grid(radius: float, n: int, center: complex = 0.0) -> QuadratureGrid:
    """Trapezoid rule on the positively oriented circle |z - center| = radius."""
    theta = 2 * np.pi * np.arange(n) / n
    z = center + radius * np.exp(1j * theta)
    w = (z - center) * (2j * np.pi / n)
    return QuadratureGrid(z, w, "circle")


def interval_grid(a: float, b: float, n: int) -> QuadratureGrid:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureGrid(a + half * (x + 1), half * w, "interval")


def ray_grid(origin: complex, angle: float, length: float, n: int) -> QuadratureGrid:
    """Gauss-Legendre on the segment origin + t e^{i angle}, 0 <= t <= length."""
    g = interval_grid(0.0, length, n)
    e = np.exp(1j * angle)
    return QuadratureGrid(origin + g.nodes * e, g.weights * e, "ray")


def until_stable(
    evaluate: Callable[[int], object],
    start: int,
    tol: float,
    max_doublings: int = 8,
    relative: bool = False,
):
    """Evaluate at start, 2*start, ... until successive results agree.

    Returns (value, nodes_used, last_difference).
    """
    n = start
    prev = evaluate(n)
    for _ in range(max_doublings):
        n *= 2
        cur = evaluate(n)
        diff = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
        scale = float(np.max(np.abs(np.asarray(cur)))) if relative else 1.0
        if diff <= tol * max(scale, 1e-300 if relative else 1.0):
            return cur, n, diff
        prev = cur
    raise NonConvergenceError(f"no agreement to {tol} after {n} nodes", cur, prev)


def contour_integral(f: Callable, radius: float, tol: float = 1e-13, start: int = 64) -> complex:
    """(1/2 pi i) times the integral of f over the circle of given radius."""

    def ev(n):
        g = circle_grid(radius, n)
        return complex(g.integrate(f(g.nodes)) / (2j * np.pi))

    return until_stable(ev, start, tol)[0]


def double_contour_integral(
    f: Callable, r1: float, r2: float, n1: int = 128, n2: int = 128
) -> complex:
    """(2 pi i)^{-2} times the integral of f(z, w) over |z|=r1, |w|=r2 at fixed nodes."""
    gz = circle_grid(r1, n1)
    gw = circle_grid(r2, n2)
    Z = gz.nodes[:, None]
    Wn = gw.nodes[None, :]
    vals = f(Z, Wn)
    return complex(np.sum(gz.weights[:, None] * gw.weights[None, :] * vals) / (2j * np.pi) ** 2)


def fourier_coefficients(values_on_circle: np.ndarray, radius: float, kmin: int, kmax: int) -> np.ndarray:
    """Coefficients c_k, kmin <= k <= kmax, of f = sum c_k z^k from samples on |z|=radius.

    Samples must come from ``circle_grid(radius, n)`` ordering; aliasing is the
    caller's responsibility (choose n well above kmax - kmin).
    """
    n = len(values_on_circle)
    spec = np.fft.fft(values_on_circle) / n  # spec[k] = sum f(z_j) e^{-2 pi i jk/n} / n
    ks = np.arange(kmin, kmax + 1)
    return spec[ks % n] / radius**ks


def nested_circle_integral(
    f: Callable,
    z_circle: tuple[complex, float],
    w_circle: tuple[complex, float],
    tol: float = 1e-12,
    start: int = 64,
    max_doublings: int = 7,
) -> complex:
    """(2 pi i)^{-2} times the integral of f(z, w) over two circles (center, radius),
    doubling the node count on both until the value is stable."""

    def ev(n):
        gz = circle_grid(z_circle[1], n, z_circle[0])
        gw = circle_grid(w_circle[1], n, w_circle[0])
        vals = f(gz.nodes[:, None], gw.nodes[None, :])
        return complex(np.sum(gz.weights[:, None] * gw.weights[None, :] * vals) / (2j * np.pi) ** 2)

    return until_stable(ev, start, tol, max_doublings)[0]


def circle_integral(
    f: Callable, circle: tuple[complex, float], tol: float = 1e-12, start: int = 64, max_doublings: int = 8
) -> complex:
    """(1/2 pi i) times the integral of f over the circle (center, radius)."""

    def ev(n):
        g = circle_grid(circle[1], n, circle[0])
        return complex(g.integrate(f(g.nodes)) / (2j * np.pi))

    return until_stable(ev, start, tol, max_doublings)[0]
