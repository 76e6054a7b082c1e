"""Uniformly random interlacing patterns with a fixed top row.

Rows y^1, ..., y^n, y^n = x fixed, with y_i^{r+1} >= y_i^r > y_{i+1}^{r+1}.
Row r is padded with the frozen points y_i^r = x_n + n - i, r < i <= n, so every
row carries n particles and the process fits the product-measure setting with
p_{r,r+1}(u, v) = 1[v >= u].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..dpp import KernelEvaluator
from ..lgv import TransitionEnsemble, general_kernel, kernel_via_cramer
from ..quadrature import nested_circle_integral
from ..symfunc import h_ones

__all__ = [
    "GTPattern",
    "enumerate_gt_patterns",
    "interlacing_ensemble",
    "interlacing_kernel",
    "interlacing_cramer_kernel",
    "interlacing_ground_set",
]


@dataclass(frozen=True)
class GTPattern:
    rows: tuple  # rows[r-1] = y^r, strictly decreasing, length r

    def __post_init__(self):
        for r, row in enumerate(self.rows, start=1):
            if len(row) != r:
                raise ValueError(f"row {r} has length {len(row)}")
        for r in range(len(self.rows) - 1):
            lo, hi = self.rows[r], self.rows[r + 1]
            for i in range(len(lo)):
                if not hi[i] >= lo[i] > hi[i + 1]:
                    raise ValueError(f"rows {r + 1} and {r + 2} do not interlace")

    def particles(self) -> frozenset:
        """All (row, position) points, frozen padding included."""
        n = len(self.rows)
        x = self.rows[-1]
        pts = set()
        for r, row in enumerate(self.rows, start=1):
            pts.update((r, y) for y in row)
            pts.update((r, x[-1] + n - i) for i in range(r + 1, n + 1))
        return frozenset(pts)


def _check_top(x: Sequence[int]) -> tuple[int, ...]:
    x = tuple(int(v) for v in x)
    if not x:
        raise ValueError("top row must be non-empty")
    if any(x[i] <= x[i + 1] for i in range(len(x) - 1)):
        raise ValueError("top row must be strictly decreasing")
    return x


def enumerate_gt_patterns(x: Sequence[int]) -> list[GTPattern]:
    """Every interlacing pattern below the top row x."""
    x = _check_top(x)
    n = len(x)
    out = []

    def below(row):
        ranges = [range(row[i + 1] + 1, row[i] + 1) for i in range(len(row) - 1)]
        return itertools.product(*ranges)

    def rec(rows):
        if len(rows[0]) == 1:
            out.append(GTPattern(tuple(rows)))
            return
        for nxt in below(rows[0]):
            rec([tuple(nxt)] + rows)

    rec([x])
    return out


def interlacing_ground_set(x: Sequence[int], padded: bool = False) -> list[tuple[int, int]]:
    """Sites a particle can visit.

    By default: rows 1..n, and on row r < n only positions above the frozen
    padding, where the contour and residue kernels apply.  With ``padded``:
    rows 1..n-1 including the padding sites, the domain of the
    product-measure routes.
    """
    x = _check_top(x)
    n = len(x)
    if padded:
        return [(r, u) for r in range(1, n) for u in range(x[-1], x[0] + 1)]
    return [(r, u) for r in range(1, n + 1) for u in range(x[-1] + max(n - r, 0), x[0] + 1)]


def interlacing_ensemble(x: Sequence[int], exact: bool = True) -> TransitionEnsemble:
    x = _check_top(x)
    n = len(x)
    start = [x[-1] + n - i for i in range(1, n + 1)]
    return TransitionEnsemble(
        L=0,
        R=n,
        transition=lambda r, u, v: 1 if v >= u else 0,
        x_left=start,
        x_right=list(x),
        window=range(max(x[0], start[0]), x[-1] - 1, -1),
        exact=exact,
    )


def interlacing_cramer_kernel(x: Sequence[int]) -> KernelEvaluator:
    """Column-replacement route with T_v the (n - s)-th forward difference."""
    x = _check_top(x)
    n = len(x)
    ens = interlacing_ensemble(x)

    def shift(s, v):
        m = n - s
        return [((-1) ** (m - t) * math.comb(m, t), v + t) for t in range(m + 1)]

    return kernel_via_cramer(
        ens,
        shift_op=shift,
        g=lambda s, v: v + s - n,
        p_LR=lambda a, b: h_ones(b - a, n),
    )


def _pochhammer_term(r: int, s: int, u: int, v: int):
    if r < s and u <= v:
        return Fraction(h_ones(v - u, s - r))
    return Fraction(0)


def _residue_tilde(x, r, u, s, v):
    """Finite residue sum over the window l = v+s-n, ..., v."""
    n = len(x)
    lo = v + s - n
    total = Fraction(0)
    for j, xj in enumerate(x):
        hj = Fraction(h_ones(xj - u, n - r))
        if hj == 0:
            continue
        for ell in range(lo, v + 1):
            den = 1
            for t in range(lo, v + 1):
                if t != ell:
                    den *= ell - t
            lag = Fraction(1)
            for i, xi in enumerate(x):
                if i != j:
                    lag *= Fraction(ell - xi, xj - xi)
            total += hj * lag / den
    return math.factorial(n - s) * total


def _contour_tilde(x, r, u, s, v, tol):
    n = len(x)
    lo = v + s - n
    inside = [xj for xj in x if xj >= u]
    if not inside:
        return 0j
    pts = inside + list(range(lo, v + 1))
    c = (min(pts) + max(pts)) / 2
    R = (max(pts) - min(pts)) / 2 + 2.0
    total = 0j
    if r == n:
        # h_{x_j - u}(1^0) is a Kronecker delta: only x_j = u contributes
        inside = [xj for xj in inside if xj == u]
        pref = math.factorial(n - s)

        def znum(z):
            return 1.0
    else:
        pref = math.factorial(n - s) / math.factorial(n - r - 1)

        def znum(z):
            out = 1.0
            for k in range(u + r - n + 1, u):
                out = out * (z - k)
            return out

    def f(z, w):
        den = 1.0
        for k in range(lo, v + 1):
            den = den * (w - k)
        ratio = 1.0
        for xi in x:
            ratio = ratio * (w - xi) / (z - xi)
        return znum(z) / den * ratio / (w - z)

    for xj in inside:
        total += nested_circle_integral(f, (xj, 0.5), (c, R), tol=tol, start=64, max_doublings=5)
    return pref * total


def interlacing_kernel(x: Sequence[int], route: str = "contour", tol: float = 1e-12) -> KernelEvaluator:
    """Kernel of the uniform interlacing pattern with top row x.

    route: "contour" (double contour integral, Gamma_u a union of small circles
    around the x_j >= u), "residue" (exact finite residue sum),
    "cramer" (column-replaced determinants), "general" (A^{-1} route).
    """
    x = _check_top(x)
    n = len(x)
    if route == "cramer":
        return interlacing_cramer_kernel(x)
    if route == "general":
        return general_kernel(interlacing_ensemble(x))

    if route == "residue":

        def K(p, q):
            (r, u), (s, v) = p, q
            return -_pochhammer_term(r, s, u, v) + _residue_tilde(x, r, u, s, v)

        return KernelEvaluator(K, name="interlacing-residue", exact=True)
    if route == "contour":

        def K(p, q):
            (r, u), (s, v) = p, q
            return -float(_pochhammer_term(r, s, u, v)) + _contour_tilde(x, r, u, s, v, tol)

        return KernelEvaluator(K, name="interlacing-contour")
    raise ValueError(f"unknown route {route!r}")
