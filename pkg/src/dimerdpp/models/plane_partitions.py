"""Random skew plane partitions in an a x b box with a removed corner shape mu.

The diagonal slices lambda^(k) = (pi_{i, k+i})_i, -a < k < b, form a Schur
process with one-variable steps; particles sit at x_j = lambda^(k)_j - j + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dpp import KernelEvaluator
from ..quadrature import nested_circle_integral
from ..symfunc import Partition

__all__ = [
    "SkewPlanePartitionSpec",
    "slice_directions",
    "skew_pp_kernel",
    "enumerate_skew_plane_partitions",
    "diagonal_slices",
    "pp_particles",
]


_PROBE = np.linspace(0, 2 * np.pi, 16, endpoint=False)


@dataclass(frozen=True)
class SkewPlanePartitionSpec:
    a: int  # rows
    b: int  # columns
    mu: tuple = ()
    q: object = 0.5  # one weight, or q_k for k = -a+1..b-1

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError("box sides must be positive")
        mu = Partition(self.mu)
        if len(mu) > self.a or (mu.parts and mu.parts[0] > self.b):
            raise ValueError("mu must fit in the box")
        if len(mu) == self.a and mu.parts[-1] == self.b:
            raise ValueError("mu fills the box")
        object.__setattr__(self, "mu", mu.parts)
        for qk in self.weights.values():
            if not 0 < qk < 1:
                raise ValueError("weights must lie in (0, 1)")

    @property
    def weights(self) -> dict:
        ks = range(-self.a + 1, self.b)
        if isinstance(self.q, (int, float)):
            return {k: float(self.q) for k in ks}
        q = [float(x) for x in self.q]
        if len(q) != len(ks):
            raise ValueError(f"need {len(ks)} weights")
        return dict(zip(ks, q))

    def cells(self) -> list[tuple[int, int]]:
        mu = Partition(self.mu)
        return [(i, j) for i in range(1, self.a + 1) for j in range(1, self.b + 1) if j > mu[i - 1]]

    def partial_product(self, k: int) -> float:
        """q_{-a+1} ... q_k (empty product 1)."""
        w = self.weights
        out = 1.0
        for t in range(-self.a + 1, k + 1):
            out *= w[t]
        return out


def _first_row(spec: SkewPlanePartitionSpec, k: int) -> int:
    mu = Partition(spec.mu)
    i = max(1, 1 - k)
    while k + i <= mu[i - 1]:
        i += 1
    return i


def slice_directions(spec: SkewPlanePartitionSpec) -> tuple[list[int], list[int]]:
    """(I, J): steps k -> k+1 with lambda^(k) < lambda^(k+1) (I) or > (J), k = -a..b-1.

    Read off the back boundary: the first cell of diagonal k+1 is one row up
    from that of diagonal k on an increasing step and in the same row on a
    decreasing one.
    """
    I, J = [], []
    for k in range(-spec.a, spec.b):
        (I if _first_row(spec, k + 1) == _first_row(spec, k) - 1 else J).append(k)
    return I, J


def _step_params(spec: SkewPlanePartitionSpec):
    I, J = slice_directions(spec)
    plus = {k: (1 / spec.partial_product(k) if k in I else 0.0) for k in range(-spec.a, spec.b)}
    minus = {k: (spec.partial_product(k) if k in J else 0.0) for k in range(-spec.a, spec.b)}
    return plus, minus


def skew_pp_kernel(spec: SkewPlanePartitionSpec, radii=None, tol: float = 1e-12) -> KernelEvaluator:
    """Correlation kernel in x = lambda_j - j + 1 on the slices -a < k < b.

    The growing steps have plus-variables 1/(q_{-a+1}...q_k) > 1, so no single
    pair of circles serves all (r, s).  For r >= s the z circle lies inside
    the w circle; for r < s the w circle is moved inside the z circle, and the
    residue at w = z cancels the single integral.  ``radii`` = (rho_z, rho_w)
    overrides the default choice and is validated per pair.
    """
    plus, minus = _step_params(spec)
    lo_k, hi_k = -spec.a, spec.b

    def bounds(r, s):
        zmin = max([minus[k] for k in range(r, hi_k)] + [0.0])
        wmax = min([1 / plus[k] for k in range(lo_k, s) if plus[k] > 0] + [float("inf")])
        return zmin, wmax

    def pick(r, s, tilt):
        # tilt > 0 favours large radii (negative net power of z, w in the integrand)
        zmin, wmax = bounds(r, s)
        if radii is not None:
            rz, rw = radii
        elif r >= s:
            lo = zmin if zmin > 0 else (wmax / 4 if wmax < float("inf") else 0.25)
            hi = wmax if wmax < float("inf") else 4 * max(lo, 1.0)
            f1, f2 = (0.55, 0.8) if tilt > 0 else (0.2, 0.45)
            rz, rw = lo ** (1 - f1) * hi**f1, lo ** (1 - f2) * hi**f2
        else:
            rz = max(2 * zmin, 1.0) if zmin > 0 else 1.0
            rw = min(wmax, rz) / 2
        ok = zmin < rz and rw < wmax and ((rz < rw) if r >= s else (rw < rz))
        if not ok:
            raise ValueError(f"radii ({rz}, {rw}) infeasible for lines ({r}, {s})")
        return rz, rw

    def K(x, y):
        (r, u), (s, v) = x, y
        if not (lo_k < r < hi_k and lo_k < s < hi_k):
            raise ValueError("slice index out of range")
        rz, rw = pick(r, s, v - u + 1)

        def f(z, w):
            val = z ** (u - 1) / (w**v * (w - z))
            for k in range(lo_k, r):
                val = val * (1 - plus[k] * z)
            for k in range(s, hi_k):
                val = val * (1 - minus[k] / w)
            for k in range(r, hi_k):
                val = val / (1 - minus[k] / z)
            for k in range(lo_k, s):
                val = val / (1 - plus[k] * w)
            return val

        # the integrand can be large on small circles; aim at relative accuracy
        scale = max(1.0, float(np.max(np.abs(f(rz * np.exp(1j * _PROBE), rw * np.exp(0.5j + 1j * _PROBE[:, None]))))))
        t = max(tol, 1e-15 * scale)
        if r >= s:
            return nested_circle_integral(f, (0, rz), (0, rw), tol=t)
        # w inside z: swap roles for the nested helper
        return nested_circle_integral(lambda w, z: f(z, w), (0, rw), (0, rz), tol=t)

    return KernelEvaluator(K, name="skew-plane-partition", a=spec.a, b=spec.b, mu=spec.mu)


def diagonal_slices(spec: SkewPlanePartitionSpec, pi: dict) -> dict:
    """k -> lambda^(k) for -a < k < b."""
    out = {}
    for k in range(-spec.a + 1, spec.b):
        parts = [pi[(i, k + i)] for i in range(1, spec.a + 1) if (i, k + i) in pi]
        out[k] = Partition(parts)
    return out


def enumerate_skew_plane_partitions(spec: SkewPlanePartitionSpec, height: int) -> list[tuple[float, dict]]:
    """(weight, pi) for all skew plane partitions with entries <= height,
    weight = prod_k q_k^{|lambda^(k)|} (unnormalized)."""
    cells = spec.cells()  # row-major, so the cells above and to the left come first
    w = spec.weights
    out = []

    def rec(idx, pi, weight):
        if idx == len(cells):
            out.append((weight, dict(pi)))
            return
        i, j = cells[idx]
        cap = min(pi.get((i - 1, j), height), pi.get((i, j - 1), height))
        for v in range(cap + 1):
            pi[(i, j)] = v
            rec(idx + 1, pi, weight * w[j - i] ** v)
        del pi[(i, j)]

    rec(0, {}, 1.0)
    return out


def pp_particles(spec: SkewPlanePartitionSpec, pi: dict, depth: int) -> frozenset:
    pts = set()
    for k, lam in diagonal_slices(spec, pi).items():
        pts.update((k, x) for x in lam.particles(depth, 1))
    return frozenset(pts)

