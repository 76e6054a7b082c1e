"""Universal limit kernels and numerical checks of scaling limits.

All contour integrals are done with Gauss-Legendre rules on rays and segments
and the trapezoid rule on circles and vertical lines.  Ray contours are cut
where the integrand has dropped below 1e-16 of its size at the vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dpp import IntervalKernel, fredholm_det_interval, fredholm_det_on_grid
from .quadrature import NonConvergenceError, QuadratureGrid, circle_grid, interval_grid, until_stable

__all__ = [
    "ScalingWindow",
    "airy_edge_coordinates",
    "ConvergenceReport",
    "default_airy_points",
    "AIRY_WINDOW",
    "ContourFamily",
    "airy_function",
    "airy_kernel",
    "heat_term",
    "extended_airy_kernel",
    "tracy_widom_f2",
    "pearcey_kernel",
    "tacnode_kernel",
    "gue_minor_kernel",
    "cusp_airy_kernel",
    "gas_kernel",
    "GasKernel",
    "gas_decay_rate",
    "verify_gas_limit",
    "aztec_edge_kernel",
    "verify_airy_limit",
]

_W3 = np.exp(1j * np.pi / 3)


# ---------------------------------------------------------------- contours


@dataclass(frozen=True)
class ContourFamily:
    """Quadrature budget shared by the limit kernels."""

    nodes: int = 128  # per ray or segment
    panels: int = 1  # Gauss-Legendre panels per ray
    circle_nodes: int = 256
    line_step: float = 0.05  # trapezoid step on vertical lines
    cutoff: float = 37.0  # drop the tail once log-size is this far below the peak

    def refined(self, factor: int = 2) -> "ContourFamily":
        return ContourFamily(
            self.nodes * factor, self.panels, self.circle_nodes * factor, self.line_step / factor, self.cutoff
        )


DEFAULT_CONTOURS = ContourFamily()


def _ray_length(logmag: Callable, start: float = 0.5, limit: float = 200.0, cutoff: float = 37.0) -> float:
    """Smallest t on a doubling-ish scan with logmag(t) < logmag(0) - cutoff.

    logmag may be vectorized over the scanned parameter; the max is used."""
    base = np.max(logmag(0.0))
    t = start
    while t < limit:
        if np.max(logmag(t)) < base - cutoff and np.max(logmag(1.25 * t)) < base - cutoff:
            return t
        t *= 1.25
    raise NonConvergenceError(f"integrand does not decay along the ray within {limit}")


def _ray(vertex, direction: complex, length, nodes: int, panels: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights (dz included) on vertex + t*direction, 0 <= t <= length.

    vertex and length may be arrays (one contour per entry, stacked along axis 0)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    t = np.concatenate([0.5 * (edges[i + 1] - edges[i]) * (x + 1) + edges[i] for i in range(panels)])
    wt = np.concatenate([0.5 * (edges[i + 1] - edges[i]) * w for i in range(panels)])
    vertex = np.asarray(vertex, dtype=complex)[..., None]
    length = np.asarray(length, dtype=float)[..., None]
    return vertex + length * t * direction, length * wt * direction


# ---------------------------------------------------------------- Airy


def airy_function(x, derivative: int = 0, contours: ContourFamily = DEFAULT_CONTOURS):
    """Ai(x) (or Ai'(x)) from its integral over the two rays leaving the real
    axis at angles +-pi/3.

    The rays start at the saddle point sqrt(x) for x >= 0.  For x < 0 the
    contour runs through both saddles +-i sqrt(-x) along the imaginary axis,
    where the integrand has modulus one, so there is no cancellation.
    """
    xa = np.asarray(x)
    scalar = xa.ndim == 0
    xs = np.atleast_1d(xa).astype(complex)
    out = np.empty(xs.shape, complex)
    re = xs.real
    pos = re >= 0
    nodes = contours.nodes

    def phase(z, xx):
        return z**3 / 3 - xx * z

    def weight(z):
        return -z if derivative else 1.0

    if np.any(pos):
        xx = xs[pos][:, None]
        p = np.sqrt(re[pos])

        def logmag(t):
            return np.real(phase(p + t * _W3, xs[pos]))

        T = _ray_length(logmag, cutoff=contours.cutoff) + 1.0
        zu, wu = _ray(p, _W3, T, nodes, contours.panels)
        zl, wl = _ray(p, np.conj(_W3), T, nodes, contours.panels)
        val = np.sum(wu * weight(zu) * np.exp(phase(zu, xx)), axis=1) - np.sum(
            wl * weight(zl) * np.exp(phase(zl, xx)), axis=1
        )
        out[pos] = val / (2j * np.pi)
    if np.any(~pos):
        xx = xs[~pos][:, None]
        s = np.sqrt(-re[~pos])

        def logmag(t):
            return np.real(phase(1j * s + t * _W3, xs[~pos]))

        T = _ray_length(logmag, cutoff=contours.cutoff) + 1.0
        zu, wu = _ray(1j * s, _W3, T, nodes, contours.panels)
        zl, wl = _ray(-1j * s, np.conj(_W3), T, nodes, contours.panels)
        # segment from -i s to i s, split in panels so oscillations are resolved
        k = max(1, int(np.ceil(np.max(s) ** 2 / 4)))
        zs, ws = _ray(-1j * s, 1j, 2 * s, nodes, k)
        val = (
            np.sum(ws * weight(zs) * np.exp(phase(zs, xx)), axis=1)
            + np.sum(wu * weight(zu) * np.exp(phase(zu, xx)), axis=1)
            - np.sum(wl * weight(zl) * np.exp(phase(zl, xx)), axis=1)
        )
        out[~pos] = val / (2j * np.pi)
    if not np.iscomplexobj(xa) and np.all(np.imag(xs) == 0):
        out = out.real
    return out[0] if scalar else out.reshape(xa.shape)


def _airy_values(x: np.ndarray):
    """Ai and Ai' at the points x, each distinct point evaluated once."""
    u, inv = np.unique(x, return_inverse=True)
    a0 = airy_function(u)[inv].reshape(x.shape)
    a1 = airy_function(u, 1)[inv].reshape(x.shape)
    return a0, a1


def _airy_taylor(a0, a1, x, h, terms: int = 30):
    """(Ai(x) Ai'(x+h) - Ai'(x) Ai(x+h)) / (-h) by the Taylor series in h, using Ai'' = x Ai."""
    derivs = [a0, a1]
    for k in range(terms):
        derivs.append(x * derivs[k] + (k * derivs[k - 1] if k >= 1 else 0))
    out = np.zeros(np.broadcast(x, h).shape)
    fact = 1.0
    for k in range(1, terms):
        fact *= k
        out = out + (a0 * derivs[k + 1] - a1 * derivs[k]) * h ** (k - 1) / fact
    return -out


def airy_kernel(x, y):
    """K_Ai(x, y) = int_0^inf Ai(x+t) Ai(y+t) dt through its closed form
    (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), with a Taylor expansion near x = y."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    ax, dx = _airy_values(x)
    ay, dy = _airy_values(y)
    h = y - x
    near = np.abs(h) < 0.05
    out = np.empty(x.shape)
    far = ~near
    out[far] = (ax[far] * dy[far] - dx[far] * ay[far]) / (x[far] - y[far])
    if np.any(near):
        out[near] = _airy_taylor(ax[near], dx[near], x[near], h[near])
    return out if out.ndim else float(out)


# ---------------------------------------------------------------- extended Airy


def heat_term(r1: float, x1: float, r2: float, x2: float) -> float:
    """phi_{r1,r2}(x1, x2): the Brownian transition density with the Airy gauge, zero unless r1 < r2."""
    if not r1 < r2:
        return 0.0
    t = r2 - r1
    return math.exp(-((x1 - x2) ** 2) / (4 * t) - 0.5 * t * (x1 + x2) + t**3 / 12) / math.sqrt(4 * math.pi * t)


def _half_line(f: Callable, tol: float = 1e-16, panel: float = 1.0, nodes: int = 24, limit: float = 400.0):
    """int_0^inf f(t) dt for f decaying faster than exponentially; f vectorized.

    Panels of fixed length are added until two consecutive panels contribute
    less than tol times the largest one."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    biggest = 0.0
    quiet = 0
    a = 0.0
    while a < limit:
        t = a + 0.5 * panel * (x + 1)
        part = np.sum(0.5 * panel * w * f(t))
        total = total + part
        size = abs(part)
        biggest = max(biggest, size)
        quiet = quiet + 1 if size <= tol * biggest else 0
        if quiet >= 2:
            return total
        a += panel
    raise NonConvergenceError("half-line integral did not decay")


def _ktilde_lambda(r1, x1, r2, x2) -> float:
    def f(lam):
        return np.exp(-lam * (r1 - r2)) * airy_function(x1 + lam) * airy_function(x2 + lam)

    return float(_half_line(f))


def _ktilde_contour(r1, x1, r2, x2, contours: ContourFamily = DEFAULT_CONTOURS) -> float:
    # z on rays at +-pi/3 from vz, w on rays at +-2pi/3 from vw; vz > vw keeps z - w away from 0
    pz = math.sqrt(max(x1, 0.0))
    pw = math.sqrt(max(x2, 0.0))
    vz, vw = r1 + pz, r2 - pw
    gap = vz - vw
    if gap < 0.5:
        vz += (0.5 - gap) / 2
        vw -= (0.5 - gap) / 2
    const = (r2**3 - r1**3) / 3 - x2 * r2 + x1 * r1

    def ez(z):
        return z**3 / 3 - r1 * z**2 - (x1 - r1**2) * z

    def ew(w):
        return -(w**3) / 3 + r2 * w**2 + (x2 - r2**2) * w

    W2 = np.exp(2j * np.pi / 3)
    Tz = _ray_length(lambda t: np.real(ez(vz + t * _W3)), cutoff=contours.cutoff) + 1.0
    Tw = _ray_length(lambda t: np.real(ew(vw + t * W2)), cutoff=contours.cutoff) + 1.0
    n = contours.nodes
    zu, wzu = _ray(vz, _W3, Tz, n, contours.panels)
    zl, wzl = _ray(vz, np.conj(_W3), Tz, n, contours.panels)
    wu, wwu = _ray(vw, W2, Tw, n, contours.panels)
    wl, wwl = _ray(vw, np.conj(W2), Tw, n, contours.panels)
    z = np.concatenate([zu, zl])
    wz = np.concatenate([wzu, -wzl])  # lower ray is traversed towards the vertex
    w = np.concatenate([wu, wl])
    ww = np.concatenate([wwu, -wwl])
    shift = np.real(ez(vz)) + np.real(ew(vw))
    F = wz[:, None] * ww[None, :] * np.exp(ez(z)[:, None] + ew(w)[None, :] - shift) / (z[:, None] - w[None, :])
    return float(np.real(np.sum(F) * np.exp(shift + const) / (2j * np.pi) ** 2))


def extended_airy_kernel(r1: float, x1: float, r2: float, x2: float, route: str = "lambda") -> float:
    """K_extAi(r1, x1; r2, x2) = -phi_{r1,r2}(x1, x2) + Ktilde, with Ktilde from the
    lambda-integral of Airy products (route "lambda") or the double contour
    integral (route "contour")."""
    if route == "lambda":
        kt = _ktilde_lambda(r1, x1, r2, x2)
    elif route == "contour":
        kt = _ktilde_contour(r1, x1, r2, x2)
    else:
        raise ValueError(f"unknown route {route!r}")
    return -heat_term(r1, x1, r2, x2) + kt


# ---------------------------------------------------------------- Tracy-Widom


def _airy_interval_kernel(s: float) -> IntervalKernel:
    return IntervalKernel(lambda X, Y: airy_kernel(X, Y), s, math.inf, symmetric=True)


def tracy_widom_f2(s: float, nodes: int | None = None, tol: float = 1e-11, return_info: bool = False):
    """F2(s) = det(I - K_Ai) on L^2(s, inf).

    With ``nodes`` a fixed Gauss-Legendre rule of that size is used (for
    self-checks); otherwise the node count is doubled until stable.
    """
    s = float(s)
    cutoff = max(12.0, 12.0 - s)
    K = _airy_interval_kernel(s)
    if nodes is not None:
        val = fredholm_det_on_grid(K.evaluator, interval_grid(s, s + cutoff, nodes))
        return (val, {"nodes": nodes, "upper": s + cutoff}) if return_info else val
    return fredholm_det_interval(K, tol=tol, start=16, cutoff=cutoff, return_info=return_info)


# ---------------------------------------------------------------- Pearcey


def _graded(length: float, nodes: int, levels: int = 40, panel: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on [0, length] with panels shrinking geometrically towards 0."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = [panel * 2.0**-k for k in range(levels, 0, -1)] + list(np.arange(panel, length + panel, panel))
    edges = [0.0] + edges
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        ts.append(a + 0.5 * (b - a) * (x + 1))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(ts), np.concatenate(ws)


def pearcey_kernel(
    r1: float, x1: float, r2: float, x2: float, contours: ContourFamily = DEFAULT_CONTOURS
) -> float:
    """Pearcey kernel: minus the heat kernel of variance r2 - r1 (for r1 < r2) plus
    the double integral with z on the four rays at angles +-pi/4, +-3pi/4 and w
    on the imaginary axis.

    The two contours cross at 0, where 1/(w - z) has an integrable point
    singularity; all four pieces use panels refined geometrically towards 0.
    """

    def ez(z):
        return z**4 / 4 - r1 * z**2 / 2 + x1 * z

    def ew(w):
        return -(w**4) / 4 + r2 * w**2 / 2 - x2 * w

    e1, e3 = np.exp(1j * np.pi / 4), np.exp(3j * np.pi / 4)
    Tz = max(_ray_length(lambda t: np.real(ez(t * d)), cutoff=contours.cutoff) for d in (e1, e3, -e1, -e3))
    Tw = max(_ray_length(lambda t: np.real(ew(t * d)), cutoff=contours.cutoff) for d in (1j, -1j))
    k = max(4, contours.nodes // 8)
    tz, wtz = _graded(Tz, k)
    tw, wtw = _graded(Tw, k)
    # upper V: in along e^{i pi/4}, out along e^{3i pi/4}; lower V: in along e^{-3i pi/4}, out along e^{-i pi/4}
    zs, wz = [], []
    for d, sign in ((e1, -1), (e3, 1), (-e1, -1), (-e3, 1)):
        zs.append(tz * d)
        wz.append(sign * wtz * d)
    z = np.concatenate(zs)
    wz = np.concatenate(wz)
    w = np.concatenate([1j * tw, -1j * tw])
    ww = np.concatenate([1j * wtw, 1j * wtw])
    F = np.exp(ez(z))[:, None] * np.exp(ew(w))[None, :] / (w[None, :] - z[:, None])
    val = np.sum(wz[:, None] * ww[None, :] * F) / (2j * np.pi) ** 2
    out = float(np.real(val))
    if r1 < r2:
        t = r2 - r1
        out -= math.exp(-((x1 - x2) ** 2) / (2 * t)) / math.sqrt(2 * math.pi * t)
    return out


# ---------------------------------------------------------------- tacnode


def _ai_shift(s: float, x):
    """Ai^{(s)}(x) = exp(2 s^3/3 + s x) Ai(s^2 + x)."""
    x = np.asarray(x, float)
    return np.exp(2 * s**3 / 3 + s * x) * airy_function(s * s + x)


def _shifted_airy_kernel(al: float, be: float, x: float, y: float) -> float:
    return float(_half_line(lambda t: _ai_shift(al, x + t) * _ai_shift(be, y + t)))


def _tac_B(lam: float, tau: float, xi: float, xs: np.ndarray, panel: float = 0.5, per_panel: int = 12) -> np.ndarray:
    """int_0^inf Ai^{(tau)}(xi + kappa t) Ai(x + t) dt for all x in xs on one shared grid."""
    kappa = (1 + 1 / math.sqrt(lam)) ** (1 / 3)
    # both factors are below 1e-16 once their arguments pass ~16 (the shift adds e^{tau kappa t})
    lo = min(float(np.min(xs)), (xi + tau * tau) / kappa)
    length = max(0.0, 16.0 - lo) + 3 * tau * tau + 4.0
    k = math.ceil(length / panel)
    x0, w0 = np.polynomial.legendre.leggauss(per_panel)
    t = ((np.arange(k)[:, None] + (x0[None, :] + 1) / 2) * panel).ravel()
    w = np.tile(w0 * panel / 2, k)
    left = _ai_shift(tau, xi + kappa * t) * w
    return airy_function(np.asarray(xs, float)[:, None] + t[None, :]) @ left


def _tac_b(lam: float, tau: float, xi: float, xs: np.ndarray) -> np.ndarray:
    return lam ** (1 / 6) * _ai_shift(lam ** (1 / 3) * tau, -(lam ** (1 / 6)) * xi + (1 + math.sqrt(lam)) ** (1 / 3) * xs)


def _tac_L(lam, sigma, r1, x1, r2, x2, nodes: int, resolvent: bool = True) -> float:
    st = lam ** (1 / 6) * (1 + math.sqrt(lam)) ** (2 / 3) * sigma
    g = interval_grid(st, max(st, 0.0) + 16.0, nodes)
    sw = np.sqrt(g.weights)
    f = (_tac_B(lam, r2, sigma + x2, g.nodes) - _tac_b(lam, r2, sigma + x2, g.nodes)) * sw
    h = _tac_B(lam, -r1, sigma + x1, g.nodes) * sw
    if resolvent:
        A = np.eye(nodes) - sw[:, None] * airy_kernel(g.nodes[:, None], g.nodes[None, :]) * sw[None, :]
        h = np.linalg.solve(A, h)
    return _shifted_airy_kernel(-r1, r2, sigma + x1, sigma + x2) + (1 + 1 / math.sqrt(lam)) ** (1 / 3) * float(f @ h)


def tacnode_kernel(
    lam: float, sigma: float, r1: float, x1: float, r2: float, x2: float, nodes: int = 48, resolvent: bool = True
) -> float:
    """Tacnode kernel with curvature ratio lam > 0 and pressure sigma.

    The resolvent of the Airy kernel on (sigma~, inf) is discretized on
    ``nodes`` Gauss-Legendre points; ``resolvent=False`` replaces it by the
    identity (its large-sigma limit).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    out = _tac_L(lam, sigma, r1, x1, r2, x2, nodes, resolvent)
    c = lam ** (1 / 3)
    out += lam ** (1 / 6) * _tac_L(
        1 / lam, lam ** (2 / 3) * sigma, c * r1, -(lam ** (1 / 6)) * x1, c * r2, -(lam ** (1 / 6)) * x2, nodes, resolvent
    )
    if r1 < r2:
        t = r2 - r1
        out -= math.exp(-((x1 - x2) ** 2) / (4 * t)) / math.sqrt(4 * math.pi * t)
    return out


# ---------------------------------------------------------------- GUE minors


def gue_minor_kernel(
    r1: int, x1: float, r2: int, x2: float, radius: float = 0.5, line: float | None = None,
    contours: ContourFamily = DEFAULT_CONTOURS,
) -> float:
    """GUE-minor kernel on {1, 2, ...} x R.  z runs over the circle |z| = radius,
    w over the vertical line Re w = line > radius (default max(radius + 0.5, x2))."""
    if r1 < 1 or r2 < 1:
        raise ValueError("lines are positive integers")
    s = max(radius + 0.5, x2) if line is None else line
    if not s > radius:
        raise ValueError("the line must lie to the right of the circle")
    gz = circle_grid(radius, contours.circle_nodes)
    T = math.sqrt(s * s + 2 * abs(x2) * s + contours.cutoff + 10) + 1
    h = contours.line_step
    t = np.arange(-T, T + h / 2, h)
    w = s + 1j * t
    ww = 1j * h * np.ones_like(t)
    z = gz.nodes
    A = gz.weights * np.exp(-(z**2) + 2 * x1 * z) / z**r1
    B = ww * w**r2 * np.exp(w**2 - 2 * x2 * w)
    val = 2 * np.sum(A[:, None] * B[None, :] / (w[None, :] - z[:, None])) / (2j * np.pi) ** 2
    out = float(np.real(val))
    if r1 > r2 and x1 >= x2:
        k = r1 - r2
        out -= 2**k * (x1 - x2) ** (k - 1) / math.factorial(k - 1)
    return out


# ---------------------------------------------------------------- Cusp-Airy


def cusp_airy_kernel(
    r1: int, x1: float, r2: int, x2: float, rho1: float = 0.5, rho2: float = 1.0, x: float = 1.5, y: float = -1.5,
    contours: ContourFamily = DEFAULT_CONTOURS,
) -> float:
    """Cusp-Airy kernel.  z runs over the rays at +-2pi/3 through y plus the circle
    of radius rho2, w over the rays at +-pi/3 through x plus the circle of
    radius rho1; 0 < rho1 < rho2 < x and rho2 < -y.

    The z circle is positively and the w circle negatively oriented; with that
    choice the one-point densities are nonnegative and symmetric in r -> -r.
    """
    if not (0 < rho1 < rho2 and rho2 < x and rho2 < -y):
        raise ValueError("need 0 < rho1 < rho2, rho2 < x and rho2 < -y")

    def ez(z):
        return -(z**3) / 3 + x2 * z

    def ew(w):
        return w**3 / 3 - x1 * w

    W2 = np.exp(2j * np.pi / 3)
    Tz = _ray_length(lambda t: np.real(ez(y + t * W2)), cutoff=contours.cutoff) + 1.0
    Tw = _ray_length(lambda t: np.real(ew(x + t * _W3)), cutoff=contours.cutoff) + 1.0
    n = contours.nodes
    zu, wzu = _ray(y, W2, Tz, n)
    zl, wzl = _ray(y, np.conj(W2), Tz, n)
    wu, wwu = _ray(x, _W3, Tw, n)
    wl, wwl = _ray(x, np.conj(_W3), Tw, n)
    cz = circle_grid(rho2, contours.circle_nodes)
    cw = circle_grid(rho1, contours.circle_nodes)
    z = np.concatenate([zu, zl, cz.nodes])
    wz = np.concatenate([wzu, -wzl, cz.weights])
    w = np.concatenate([wu, wl, cw.nodes])
    ww = np.concatenate([wwu, -wwl, -cw.weights])  # the w circle is negatively oriented
    A = wz * np.exp(ez(z)) / z**r2
    B = ww * np.exp(ew(w)) * w**r1
    val = np.sum(A[:, None] * B[None, :] / (w[None, :] - z[:, None])) / (2j * np.pi) ** 2
    out = float(np.real(val))
    if r1 < r2 and x1 <= x2:
        k = r2 - r1
        out -= (x2 - x1) ** (k - 1) / math.factorial(k - 1)
    return out


# ---------------------------------------------------------------- two-periodic gas phase


def _vertex_class(p) -> int:
    return ((p[0] + p[1]) % 4 - 1) // 2


class GasKernel:
    """Full-plane inverse Kasteleyn matrix of the two-periodic weighting, from
    the double circle integral on |u1| = sqrt(r1/r2), |u2| = sqrt(r1 r2).

    Both terms of the integrand are Laurent coefficients of 1/c~(u1, u2), which
    are read off one two-dimensional FFT.
    """

    def __init__(self, a: float, r1: float = 1.0, r2: float = 1.0, nodes: int = 256):
        if not a > 0:
            raise ValueError("a must be positive")
        self.a = float(a)
        self.R1 = math.sqrt(r1 / r2)
        self.R2 = math.sqrt(r1 * r2)
        self.nodes = nodes
        th = 2 * np.pi * np.arange(nodes) / nodes
        u1 = self.R1 * np.exp(1j * th)[:, None]
        u2 = self.R2 * np.exp(1j * th)[None, :]
        ct = 2 * (1 + self.a**2) + self.a * (u1 + 1 / u1) * (u2 + 1 / u2)
        scale = 2 * (1 + self.a**2)
        if np.min(np.abs(ct)) < 1e-8 * scale:
            raise ValueError("the characteristic polynomial vanishes on the torus (liquid radii)")
        self.min_abs = float(np.min(np.abs(ct)))
        self._fft = np.fft.fft2(1 / ct) / nodes**2

    def coefficient(self, j: int, k: int) -> complex:
        """[u1^j u2^k] of 1/c~ on the torus."""
        n = self.nodes
        return complex(self._fft[j % n, k % n] / (self.R1**j * self.R2**k))

    def __call__(self, x, y) -> complex:
        """K(x, y) for a white vertex x = (odd, even) and a black vertex y = (even, odd)."""
        if not (x[0] % 2 == 1 and x[1] % 2 == 0 and y[0] % 2 == 0 and y[1] % 2 == 1):
            raise ValueError("x must be white (odd, even) and y black (even, odd)")
        e1, e2 = _vertex_class(x), _vertex_class(y)
        h = e1 * (1 - e2) + e2 * (1 - e1)
        p = (x[0] - y[0] + 1) // 2
        q = (x[1] - y[1] + 1) // 2
        a = self.a
        val = a**e2 * self.coefficient(p, q - 1 + h) + a ** (1 - e2) * self.coefficient(p - 1, q - h)
        return -(1j ** (1 + h)) * val


def gas_kernel(r1: float, r2: float, a: float, x, y) -> complex:
    return GasKernel(a, r1, r2)(x, y)


def gas_decay_rate(a: float, distances: Sequence[int] = tuple(range(3, 21, 2))) -> float:
    """Fitted rate c in |K(w, b)| ~ e^{-c d} along the first axis, w = (d, 0), b = (0, 1), d odd."""
    G = GasKernel(a)
    ds = np.array([d for d in distances if d % 2 == 1], float)
    if len(ds) < 2:
        raise ValueError("need at least two odd distances")
    vals = np.array([abs(G((int(d), 0), (0, 1))) for d in ds])
    return float(-np.polyfit(ds, np.log(vals), 1)[0])


def verify_gas_limit(a: float = 0.5, sizes: Sequence[int] = (8, 16, 24), reach: int = 1) -> ConvergenceReport:
    """Max |finite two-periodic K^{-1} - gas kernel| over white vertices next to
    the centre (n, n) and black vertices within ``reach`` diagonal steps.

    The finite and full-plane lattices share coordinates, so no shift is needed.
    """
    from .kasteleyn import build_two_periodic_aztec

    G = GasKernel(a)
    rep = ConvergenceReport(list(sizes), [])
    steps = [(i, j) for i in range(-2 * reach + 1, 2 * reach, 2) for j in range(-2 * reach + 1, 2 * reach, 2)]
    for n in sizes:
        g, K = build_two_periodic_aztec(n=n, a=a)
        whites = [w for w in ((n - 1, n), (n + 1, n), (n - 1, n + 2), (n + 1, n + 2)) if w in g.white_index]
        pairs = [(w, (w[0] + i, w[1] + j)) for w in whites for i, j in steps if (w[0] + i, w[1] + j) in g.black_index]
        blacks = sorted({g.black_index[b] for _, b in pairs})
        cols = K.inverse_columns(blacks)
        pos = {b: k for k, b in enumerate(blacks)}
        worst = 0.0
        for w, b in pairs:
            fin = cols[g.white_index[w], pos[g.black_index[b]]]
            lim = G(w, b)
            rep.values[(n, w, b)] = (complex(fin), lim)
            worst = max(worst, abs(fin - lim))
        rep.max_errors.append(float(worst))
    if len(sizes) >= 2 and all(e > 0 for e in rep.max_errors):
        # exponential in n: fit log err = c0 - rate n
        rep.exponent = float(-np.polyfit(np.asarray(sizes, float), np.log(rep.max_errors), 1)[0])
    return rep


# ---------------------------------------------------------------- Aztec edge scaling


@dataclass(frozen=True)
class ScalingWindow:
    """line = [c n + alpha n^gamma rho], position = [d n + beta n^delta (xi - curvature rho^2)]."""

    c: float
    d: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    curvature: float = 0.0

    def __post_init__(self):
        if not (0 < self.gamma < 1 and 0 < self.delta < 1):
            raise ValueError("scaling exponents must lie in (0, 1)")

    def line(self, n: int, rho: float) -> int:
        return math.floor(self.c * n + self.alpha * n**self.gamma * rho)

    def position(self, n: int, xi: float, rho: float = 0.0) -> int:
        return math.floor(self.d * n + self.beta * n**self.delta * (xi - self.curvature * rho**2))

    def point(self, n: int, rho: float, xi: float) -> tuple[int, int]:
        return self.line(n, rho), self.position(n, xi, rho)

    def jacobian(self, n: int) -> float:
        """Lattice sites per unit of xi."""
        return abs(self.beta) * n**self.delta


# beta > 0: particles of the Aztec ensemble fill the positions below the edge
AIRY_WINDOW = ScalingWindow(1 + 1 / math.sqrt(2), 1 / math.sqrt(2), 2 ** (-1 / 6), 2 ** (-5 / 6), 2 / 3, 1 / 3, 1.0)

_ZC = 1 + math.sqrt(2)  # double critical point of the uniform Aztec kernel at the edge point


def _crowded_circle(center: float, radius: float, nodes: int, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid rule on a circle after the periodic change of variables
    theta = 2 arctan(k tan(phi/2)), which crowds nodes near theta = 0 for k < 1."""
    phi = 2 * np.pi * (np.arange(nodes) + 0.5) / nodes - np.pi
    tp = np.tan(phi / 2)
    theta = 2 * np.arctan(k * tp)
    dtheta = k * (1 + tp**2) / (1 + (k * tp) ** 2)
    e = np.exp(1j * theta)
    z = center + radius * e
    return z, 1j * radius * e * dtheta * (2 * np.pi / nodes)


def _single_term_integer(u: int, v: int, p: int, q: int) -> int:
    """Sum of the residues at 0 and 1 of z^{u-v-1} (1+z)^p / (1-1/z)^q (p, q >= 0)."""
    if q == 0:
        return math.comb(p, v - u) if 0 <= v - u <= p else 0
    total = 0
    for i in range(p + 1):
        j = u - v + i
        if j >= 0:
            total += math.comb(p, i) * math.comb(q + j - 1, j)
    return total


def aztec_edge_kernel(
    n: int, x: tuple[int, int], y: tuple[int, int], log_gauge: float = 0.0, nodes: int = 256, tol: float = 1e-10
) -> float:
    """exp(log_gauge) K^OneAz_n(x; y) for the uniform Aztec diamond (a = 1) and
    large n, x = (line, position).

    The contours are circles through the neighbourhood of the double critical
    point 1 + sqrt(2): z on a circle centred at 1.2 (the real part of the
    exponent peaks there), w on a circle centred at 0 (where it is smallest),
    kept n^{-1/3} apart.  Nodes are crowded near the critical point and doubled
    until stable.  The single integral is an exact binomial sum.
    """
    (R, u), (S, v) = x, y
    if not (0 < R < 2 * n and 0 < S < 2 * n):
        raise ValueError("line outside 1..2n-1")
    r, e1 = divmod(R, 2)
    s, e2 = divmod(S, 2)
    if u - 1 + n - r < 0:
        raise ValueError("position too low for the edge contours (pole at z = 0)")

    def Lz(z):
        return (u - 1) * np.log(z) - (n - r) * np.log(1 - 1 / z) - (r + e1) * np.log(1 + z)

    def Lw(w):
        return -v * np.log(w) + (n - s) * np.log(1 - 1 / w) + (s + e2) * np.log(1 + w)

    cz = float(np.real(Lz(_ZC)))
    cw = float(np.real(Lw(_ZC)))
    gap = 0.5 * n ** (-1 / 3)
    k = min(1.0, 3 * n ** (-1 / 3))

    scale = math.exp(cz + cw + log_gauge) / (2j * np.pi) ** 2

    def ev(m):
        z, wz = _crowded_circle(1.2, _ZC - 1.2 - gap, m, k)
        w, ww = _crowded_circle(0.0, _ZC + gap, m, k)
        A = wz * np.exp(Lz(z) - cz)
        B = ww * np.exp(Lw(w) - cw)
        return scale * complex(np.sum(A[:, None] * B[None, :] / (w[None, :] - z[:, None])))

    val, _, _ = until_stable(ev, nodes, tol, max_doublings=5, relative=False)
    total = float(np.real(val))
    if R < S:
        I = _single_term_integer(u, v, s - r + e2 - e1, s - r)
        if I:
            total -= math.copysign(math.exp(math.log(abs(I)) + log_gauge), I)
    return total


def airy_edge_coordinates(n: int, x: tuple[int, int], window: ScalingWindow = AIRY_WINDOW) -> tuple[float, float]:
    """Continuum coordinates (rho, xi) of the lattice site x = (line, position).

    The edge curve bends like -rho^2 in xi (the window's curvature).  A site sits half a step below its
    label (z^{u-1} against w^{-v}) and odd lines a further 1/sqrt(2) steps
    (the factor (z - 1/z)^{-1/2} at the critical point).
    """
    R, u = x
    rho = (R - window.c * n) / (window.alpha * n**window.gamma)
    shift = 0.5 + (R % 2) / math.sqrt(2)
    xi = (u - shift - window.d * n) / (window.beta * n**window.delta) + window.curvature * rho**2
    return rho, xi


def _airy_gauge(n: int, window: ScalingWindow, x, y, p1, p2) -> float:
    (r1, xi1), (r2, xi2) = p1, p2
    (R1, u1), (R2, u2) = x, y
    return (
        (u1 - u2 + R2 - R1) * math.log(math.sqrt(2) - 1)
        + (R1 % 2 - R2 % 2) * math.log(2) / 2
        + xi1 * r1 - xi2 * r2 - r1**3 / 3 + r2**3 / 3
        + math.log(window.jacobian(n))
    )


def default_airy_points() -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """3 x 3 grid of argument pairs built from three (rho, xi) points."""
    base = [(-0.5, -1.0), (0.0, 0.0), (0.5, 1.0)]
    return [(p, q) for p in base for q in base]


@dataclass
class ConvergenceReport:
    sizes: list
    max_errors: list
    values: dict = field(default_factory=dict)
    exponent: float = float("nan")
    flagged: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.max_errors, self.max_errors[1:]))

    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes,
            "max_errors": self.max_errors,
            "exponent": self.exponent,
            "monotone": self.monotone,
            "flagged": self.flagged,
        }


def verify_airy_limit(
    a: float = 1.0, n_list: Sequence[int] = (100, 200, 400, 800), sample_points=None,
    window: ScalingWindow = AIRY_WINDOW,
) -> ConvergenceReport:
    """Compare the conjugated, rescaled Aztec kernel with the extended Airy kernel.

    Lattice sites are chosen by the window; both kernels are then compared at
    the site's own continuum coordinates, so rounding does not enter the
    error.  err ~ n^{-exponent} is fitted by least squares in log-log.
    """
    if a != 1:
        raise ValueError("the edge constants are those of the uniform weighting a = 1")
    pts = default_airy_points() if sample_points is None else list(sample_points)
    rep = ConvergenceReport(list(n_list), [])
    for n in n_list:
        worst = 0.0
        for p, q in pts:
            x, y = window.point(n, *p), window.point(n, *q)
            p1, p2 = airy_edge_coordinates(n, x, window), airy_edge_coordinates(n, y, window)
            try:
                val = aztec_edge_kernel(n, x, y, _airy_gauge(n, window, x, y, p1, p2))
            except (NonConvergenceError, ValueError) as exc:
                rep.flagged.append({"n": n, "points": (p, q), "error": str(exc)})
                continue
            err = abs(val - extended_airy_kernel(p1[0], p1[1], p2[0], p2[1]))
            rep.values[(n, p, q)] = (val, err)
            worst = max(worst, err)
        rep.max_errors.append(worst)
    if len(n_list) >= 2 and all(e > 0 for e in rep.max_errors):
        slope = np.polyfit(np.log(np.asarray(n_list, float)), np.log(rep.max_errors), 1)[0]
        rep.exponent = float(-slope)
    return rep
