"""Determinantal point processes on finite sets and on real intervals."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .quadrature import NonConvergenceError, QuadratureGrid, interval_grid

__all__ = [
    "FiniteKernel",
    "IntervalKernel",
    "ConjugationGauge",
    "KernelEvaluator",
    "correlation",
    "correlations",
    "fredholm_det_finite",
    "fredholm_series",
    "fredholm_det_interval",
    "fredholm_det_on_grid",
    "dual_kernel",
    "conjugate",
]


class KernelEvaluator:
    """A kernel K(x, y) on some ground space, plus bookkeeping.

    ``func`` takes two points of the ground space.  Points are whatever the
    model uses, typically (line, position) tuples.
    """

    def __init__(self, func: Callable, name: str = "", gauge: Callable | None = None, **meta):
        self.func = func
        self.name = name
        self.gauge = gauge
        self.meta = meta

    def __call__(self, x, y):
        return self.func(x, y)

    def matrix(self, points: Sequence) -> np.ndarray:
        return np.array([[self.func(x, y) for y in points] for x in points], dtype=complex)

    def on(self, points: Sequence) -> "FiniteKernel":
        return FiniteKernel(list(points), self.matrix(points))

    def correlation(self, points: Sequence) -> complex:
        if len(points) == 0:
            return 1.0 + 0j
        return complex(np.linalg.det(self.matrix(points)))

    def __repr__(self) -> str:
        return f"KernelEvaluator({self.name!r})"


@dataclass
class FiniteKernel:
    ground_set: list
    matrix: np.ndarray
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix)
        n = len(self.ground_set)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match ground set of size {n}")
        self._index = {x: i for i, x in enumerate(self.ground_set)}
        if len(self._index) != n:
            raise ValueError("ground set has repeated points")

    def index(self, points: Iterable[Hashable]) -> list[int]:
        out = []
        for p in points:
            if p not in self._index:
                raise KeyError(f"point {p!r} is not in the ground set")
            out.append(self._index[p])
        return out

    def submatrix(self, points) -> np.ndarray:
        idx = self.index(points)
        return self.matrix[np.ix_(idx, idx)]

    def __call__(self, x, y):
        i, j = self.index([x, y])
        return self.matrix[i, j]


@dataclass(frozen=True)
class ConjugationGauge:
    c: Callable

    def __call__(self, x):
        return self.c(x)


@dataclass(frozen=True)
class IntervalKernel:
    """Kernel on an interval (a, b]; b may be inf (then a cutoff is chosen)."""

    evaluator: Callable  # vectorized: (X, Y) arrays -> array
    a: float
    b: float = math.inf
    symmetric: bool = False


def _det(m: np.ndarray) -> complex:
    if m.size == 0:
        return 1.0 + 0j
    if np.issubdtype(m.dtype, np.object_):
        from .symfunc import exact_det

        return exact_det(m.tolist())
    return complex(np.linalg.det(m))


def correlation(K: FiniteKernel, points: Sequence) -> complex:
    """rho_n(points) = det(K(x_i, x_j))."""
    return _det(K.submatrix(points))


def correlations(K: FiniteKernel, max_order: int) -> dict:
    """All correlations of order 1..max_order over subsets of the ground set."""
    out = {}
    for k in range(1, max_order + 1):
        for pts in itertools.combinations(K.ground_set, k):
            out[pts] = correlation(K, pts)
    return out


def fredholm_det_finite(K: FiniteKernel, B: Sequence) -> complex:
    """det(I - K) restricted to B; the probability of no particle in B."""
    sub = K.submatrix(B)
    return _det(np.eye(len(B)) - sub)


def fredholm_series(K: FiniteKernel, B: Sequence) -> complex:
    """The same determinant through the expansion sum_k (-1)^k sum_{|S|=k} det K_S."""
    total = 0
    for k in range(len(B) + 1):
        for S in itertools.combinations(B, k):
            total += (-1) ** k * correlation(K, S)
    return total


def dual_kernel(K: FiniteKernel) -> FiniteKernel:
    """I - K; its correlations are hole probabilities of K."""
    return FiniteKernel(list(K.ground_set), np.eye(len(K.ground_set)) - K.matrix)


def conjugate(K: FiniteKernel, gauge: ConjugationGauge | Callable) -> FiniteKernel:
    """Entry (x, y) -> c(x) K(x, y) / c(y)."""
    c = np.array([gauge(x) for x in K.ground_set], dtype=complex)
    if np.any(c == 0):
        bad = [x for x, v in zip(K.ground_set, c) if v == 0]
        raise ValueError(f"gauge vanishes at {bad}")
    return FiniteKernel(list(K.ground_set), c[:, None] * K.matrix / c[None, :])


def fredholm_det_on_grid(kernel: Callable, grid: QuadratureGrid) -> float:
    """det(I - W^{1/2} K W^{1/2}) on the grid nodes (Bornemann's method)."""
    x = grid.nodes
    sw = np.sqrt(grid.weights)
    m = kernel(x[:, None], x[None, :])
    a = np.eye(len(x)) - sw[:, None] * m * sw[None, :]
    d = np.linalg.det(a)
    return float(d.real) if np.isrealobj(d) or abs(np.imag(d)) < 1e-14 else d


def fredholm_det_interval(
    K: IntervalKernel,
    tol: float = 1e-12,
    start: int = 32,
    max_doublings: int = 6,
    cutoff: float | None = None,
    return_info: bool = False,
):
    """Fredholm determinant of K on (a, b] by Gauss-Legendre with node doubling.

    For b = inf the interval is truncated at a + T where T is chosen so the
    kernel diagonal falls below 1e-16 (scanning outwards in unit steps), unless
    ``cutoff`` is given.
    """
    a, b = K.a, K.b
    if math.isinf(b):
        if cutoff is None:
            t = 1.0
            while t < 200:
                d = abs(complex(np.asarray(K.evaluator(np.array([a + t]), np.array([a + t])))[0]))
                if d < 1e-16:
                    break
                t += 1.0
            b = a + t
        else:
            b = a + cutoff
    n = start
    prev = fredholm_det_on_grid(K.evaluator, interval_grid(a, b, n))
    for _ in range(max_doublings):
        n *= 2
        cur = fredholm_det_on_grid(K.evaluator, interval_grid(a, b, n))
        err = abs(cur - prev)
        if err <= tol:
            if return_info:
                return cur, {"nodes": n, "error": err, "upper": b}
            return cur
        prev = cur
    raise NonConvergenceError(f"Fredholm determinant not stable to {tol} at {n} nodes", cur, prev)
