"""Partitions, symmetric polynomials and small exact determinant identities.

Everything here works over any numeric type that supports ring arithmetic, so
passing ``int`` or ``fractions.Fraction`` arguments keeps results exact while
complex floats give ordinary floating point answers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

__all__ = [
    "Partition",
    "SkewShape",
    "elementary_symmetric",
    "complete_symmetric",
    "power_sum",
    "skew_schur",
    "skew_schur_dual",
    "schur_bialternant",
    "interlaces",
    "vandermonde",
    "vandermonde_det",
    "exact_det",
    "cauchy_binet_check",
    "partitions_in_box",
    "h_ones",
]


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __init__(self, parts: Iterable[int] = ()):
        p = [int(x) for x in parts]
        if any(x < 0 for x in p):
            raise ValueError("partition parts must be non-negative")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"parts must be weakly decreasing: {p}")
        while p and p[-1] == 0:
            p.pop()
        object.__setattr__(self, "parts", tuple(p))

    def __getitem__(self, i: int) -> int:
        # zero-padded, 0-based
        return self.parts[i] if 0 <= i < len(self.parts) else 0

    def __len__(self) -> int:
        return len(self.parts)

    def length(self) -> int:
        return len(self.parts)

    def weight(self) -> int:
        return sum(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition()
        return Partition(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))

    def contains(self, other: "Partition") -> bool:
        return all(self[i] >= other[i] for i in range(max(len(self), len(other))))

    def particles(self, count: int, offset: int = 1) -> tuple[int, ...]:
        """Positions lambda_j - j + offset for j = 1..count."""
        return tuple(self[j - 1] - j + offset for j in range(1, count + 1))

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


@dataclass(frozen=True)
class SkewShape:
    outer: Partition
    inner: Partition = Partition()

    def __post_init__(self):
        if not self.outer.contains(self.inner):
            raise ValueError(f"{self.inner} is not contained in {self.outer}")

    def conjugate(self) -> "SkewShape":
        return SkewShape(self.outer.conjugate(), self.inner.conjugate())

    def size(self) -> int:
        return self.outer.weight() - self.inner.weight()


def _as_partition(p) -> Partition:
    return p if isinstance(p, Partition) else Partition(p)


def elementary_symmetric(k: int, x: Sequence) -> object:
    """Coefficient of z^k in prod(1 + x_i z)."""
    if k < 0 or k > len(x):
        return 0
    coeffs = [1] + [0] * k
    for xi in x:
        for j in range(k, 0, -1):
            coeffs[j] = coeffs[j] + xi * coeffs[j - 1]
    return coeffs[k]


def complete_symmetric(k: int, x: Sequence) -> object:
    """Coefficient of z^k in prod 1/(1 - x_i z)."""
    if k < 0:
        return 0
    coeffs = [1] + [0] * k
    for xi in x:
        for j in range(1, k + 1):
            coeffs[j] = coeffs[j] + xi * coeffs[j - 1]
    return coeffs[k]


def power_sum(k: int, x: Sequence) -> object:
    return sum(xi**k for xi in x)


def h_ones(k: int, n: int) -> int:
    """h_k(1,...,1) with n ones, i.e. C(k+n-1, n-1); zero for k < 0."""
    if k < 0 or n < 0:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    return math.comb(k + n - 1, n - 1)


def exact_det(rows: Sequence[Sequence]) -> object:
    """Determinant by Gaussian elimination without floating point.

    Entries are promoted to Fraction when they are ints, so the result is exact
    for rational input.  Other exact field types (e.g. Fraction) pass through.
    """
    n = len(rows)
    if n == 0:
        return 1
    a = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in rows]
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        pv = a[c][c]
        det = det * pv
        inv = 1 / pv
        rowc = a[c]
        for r in range(c + 1, n):
            f = a[r][c]
            if f != 0:
                f = f * inv
                rowr = a[r]
                for k in range(c + 1, n):
                    if rowc[k] != 0:
                        rowr[k] = rowr[k] - f * rowc[k]
    if isinstance(det, Fraction) and det.denominator == 1:
        return int(det)
    return det


def _det(rows):
    if not rows:
        return 1
    if all(isinstance(v, (int, Fraction)) for row in rows for v in row):
        return exact_det(rows)
    import numpy as np

    return complex(np.linalg.det(np.array(rows, dtype=complex)))


def skew_schur(shape, x: Sequence, inner=None) -> object:
    """s_{lambda/mu}(x) = det(h_{lambda_i - mu_j - i + j}(x)).

    ``shape`` is a SkewShape, or an outer partition with ``inner`` given
    separately.
    """
    if not isinstance(shape, SkewShape):
        shape = SkewShape(_as_partition(shape), _as_partition(inner or ()))
    lam, mu = shape.outer, shape.inner
    m = len(lam)
    if m == 0:
        return 1
    rows = [[complete_symmetric(lam[i] - mu[j] - i + j, x) for j in range(m)] for i in range(m)]
    return _det(rows)


def skew_schur_dual(shape, x: Sequence, inner=None) -> object:
    """s_{lambda/mu}(x) through the e-determinant on the conjugate shape."""
    if not isinstance(shape, SkewShape):
        shape = SkewShape(_as_partition(shape), _as_partition(inner or ()))
    conj = shape.conjugate()
    lam, mu = conj.outer, conj.inner
    m = len(lam)
    if m == 0:
        return 1
    rows = [[elementary_symmetric(lam[i] - mu[j] - i + j, x) for j in range(m)] for i in range(m)]
    return _det(rows)


def schur_bialternant(lam, x: Sequence) -> object:
    """det(x_j^{lambda_i + n - i}) / det(x_j^{n - i}) for distinct x."""
    lam = _as_partition(lam)
    n = len(x)
    if len(lam) > n:
        return 0
    num = [[x[j] ** (lam[i] + n - 1 - i) for j in range(n)] for i in range(n)]
    return _det(num) / vandermonde_det(x)


def interlaces(lam, mu) -> bool:
    """lambda_1 >= mu_1 >= lambda_2 >= mu_2 >= ..."""
    lam, mu = _as_partition(lam), _as_partition(mu)
    k = max(len(lam), len(mu)) + 1
    return all(lam[i] >= mu[i] >= lam[i + 1] for i in range(k))


def vandermonde(x: Sequence) -> object:
    """prod_{i<j} (x_j - x_i)."""
    out = 1
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            out = out * (x[j] - x[i])
    return out


def vandermonde_det(x: Sequence) -> object:
    """The same quantity as det(x_i^{j-1}), evaluated as a product."""
    return vandermonde(x)


def cauchy_binet_check(
    f: Sequence[Callable], g: Sequence[Callable], mu: dict
) -> tuple[object, object]:
    """Both sides of the Andreief identity on a finite weighted set.

    lhs = (1/n!) sum over X^n of det(f_i(x_j)) det(g_i(x_j)) prod mu(x_j)
    rhs = det(sum_x f_i(x) g_j(x) mu(x))
    """
    n = len(f)
    if len(g) != n:
        raise ValueError("f and g must have the same length")
    pts = list(mu)
    lhs = 0
    for tup in itertools.product(pts, repeat=n):
        w = 1
        for t in tup:
            w = w * mu[t]
        if w == 0:
            continue
        df = _det([[f[i](t) for t in tup] for i in range(n)])
        if df == 0:
            continue
        dg = _det([[g[i](t) for t in tup] for i in range(n)])
        lhs = lhs + df * dg * w
    fact = math.factorial(n)
    lhs = Fraction(lhs, fact) if isinstance(lhs, int) else lhs / fact
    if isinstance(lhs, Fraction) and lhs.denominator == 1:
        lhs = int(lhs)
    gram = [[sum(f[i](t) * g[j](t) * mu[t] for t in pts) for j in range(n)] for i in range(n)]
    return lhs, _det(gram)


def partitions_in_box(rows: int, cols: int) -> Iterable[Partition]:
    """All partitions with at most ``rows`` parts, each at most ``cols``."""

    def rec(prefix, remaining, cap):
        if remaining == 0:
            yield Partition(prefix)
            return
        for v in range(cap, -1, -1):
            yield from rec(prefix + [v], remaining - 1, v)

    yield from rec([], rows, cols)
