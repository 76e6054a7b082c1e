"""Schur processes and the Schur measure.

A Schur process on partitions lambda^(L+1), ..., lambda^(R-1) with empty ends
is a product of skew Schur weights S_{c,d}(lambda^(k), lambda^(k+1); a^k),
with c in {"h", "e"} (horizontal or vertical strips) and d = +1 (growing) or
-1 (shrinking).  Particles sit at x_j = lambda_j - j + d0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..dpp import KernelEvaluator
from ..quadrature import nested_circle_integral
from ..symfunc import Partition, skew_schur
from ..toeplitz import LevelSymbols, SymbolSpec, infinite_toeplitz_kernel, toeplitz_det

__all__ = [
    "SchurProcessSpec",
    "schur_symbol",
    "schur_process_levels",
    "schur_process_kernel",
    "schur_measure_kernel",
    "schur_partition_function",
    "schur_process_normalization",
    "schur_transition_weight",
    "enumerate_schur_process",
    "partitions_up_to",
    "toeplitz_partition_function",
    "schur_particles",
]


@dataclass(frozen=True)
class SchurProcessSpec:
    params: tuple  # params[k - L] = tuple of variables a^k
    c: tuple  # "h" or "e" per step
    d: tuple  # +1 or -1 per step
    L: int = 0
    shift: int = 1  # x_j = lambda_j - j + shift

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(tuple(float(x) for x in p) for p in self.params))
        if not (len(self.params) == len(self.c) == len(self.d)):
            raise ValueError("params, c and d must have one entry per step")
        for p in self.params:
            if any(not 0 < x < 1 for x in p):
                raise ValueError("Schur process variables must lie in (0, 1)")
        if any(ci not in ("h", "e") for ci in self.c) or any(di not in (1, -1) for di in self.d):
            raise ValueError("c must be 'h'/'e' and d must be +1/-1")

    @property
    def R(self) -> int:
        return self.L + len(self.params)

    @classmethod
    def aztec(cls, n: int, a: float) -> "SchurProcessSpec":
        """The Aztec diamond specialization: e-steps up from even lines, h-steps down from odd lines."""
        steps = 2 * n
        return cls(
            params=tuple((a,) for _ in range(steps)),
            c=tuple("e" if k % 2 == 0 else "h" for k in range(steps)),
            d=tuple(1 if k % 2 == 0 else -1 for k in range(steps)),
            L=0,
            shift=1,
        )

    @classmethod
    def schur_measure(cls, a: Sequence[float], b: Sequence[float]) -> "SchurProcessSpec":
        return cls(params=(tuple(a), tuple(b)), c=("h", "h"), d=(1, -1), L=0, shift=1)


def schur_symbol(c: str, d: int, avars: Sequence[float]) -> SymbolSpec:
    """prod 1/(1 - a z^d) for c = "h", prod (1 + a z^d) for c = "e"."""
    factors = tuple((a, -1) if c == "h" else (-a, 1) for a in avars)
    return SymbolSpec(factors, ()) if d == 1 else SymbolSpec((), factors)


def schur_process_levels(spec: SchurProcessSpec) -> LevelSymbols:
    return LevelSymbols(
        [schur_symbol(c, d, p) for c, d, p in zip(spec.c, spec.d, spec.params)], L=spec.L, d=spec.shift
    )


def schur_process_kernel(spec: SchurProcessSpec, radii=None, tol: float = 1e-12) -> KernelEvaluator:
    """Kernel of the Schur process through the infinite Toeplitz contour formula."""
    ev = infinite_toeplitz_kernel(schur_process_levels(spec), radii=radii, tol=tol)
    ev.meta["model"] = "schur-process"
    return ev


def schur_measure_kernel(a: Sequence[float], b: Sequence[float], radii=None, tol: float = 1e-12) -> KernelEvaluator:
    """K(u, v) for x_j = lambda_j + 1 - j under s_lambda(a) s_lambda(b) / Z,
    coded straight from its double contour integral."""
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if len(a) != len(b):
        raise ValueError("the two specializations must have the same number of variables")
    m = len(a)
    lo, hi = max(b), 1 / max(a)
    if radii is None:
        radii = (lo ** (2 / 3) * hi ** (1 / 3), lo ** (1 / 3) * hi ** (2 / 3))
    r1, r2 = radii
    if not lo < r1 < r2 < hi:
        raise ValueError(f"need {lo} < rho1 < rho2 < {hi}")

    def K(x, y):
        u, v = x, y

        def f(z, w):
            val = z ** (u + m - 1) / (w ** (v + m) * (w - z))
            for ai, bi in zip(a, b):
                val = val * (1 - ai * z) * (w - bi) / ((1 - ai * w) * (z - bi))
            return val

        return nested_circle_integral(f, (0, r1), (0, r2), tol=tol)

    return KernelEvaluator(K, name="schur-measure", radii=radii)


def _pair_sets(spec: SchurProcessSpec):
    plus = [k for k in range(len(spec.d)) if spec.d[k] == 1]
    minus = [k for k in range(len(spec.d)) if spec.d[k] == -1]
    return plus, minus


def _cauchy(c1, c2, x, y):
    # H(x; y) for a plus step of type c1 and a minus step of type c2
    return 1 / (1 - x * y) if c1 == c2 else 1 + x * y


def schur_partition_function(spec: SchurProcessSpec) -> float:
    """prod over all (plus step, minus step) pairs of the Cauchy factors.

    This is the strong Szego limit of the Toeplitz determinants D_M of the
    product symbol.  It equals the normalization of the Schur process only
    when every plus step comes before every minus step; see
    ``schur_process_normalization``.
    """
    plus, minus = _pair_sets(spec)
    Z = 1.0
    for k1 in plus:
        for k2 in minus:
            for x in spec.params[k1]:
                for y in spec.params[k2]:
                    Z *= _cauchy(spec.c[k1], spec.c[k2], x, y)
    return Z


def schur_process_normalization(spec: SchurProcessSpec) -> float:
    """Sum of the Schur process weights: Cauchy factors over pairs with the plus step first."""
    plus, minus = _pair_sets(spec)
    Z = 1.0
    for k1 in plus:
        for k2 in minus:
            if k1 < k2:
                for x in spec.params[k1]:
                    for y in spec.params[k2]:
                        Z *= _cauchy(spec.c[k1], spec.c[k2], x, y)
    return Z


def toeplitz_partition_function(spec: SchurProcessSpec, M: int) -> complex:
    levels = schur_process_levels(spec)
    return toeplitz_det(levels.product(levels.L, levels.R), M)


def schur_transition_weight(c: str, d: int, lam: Partition, mu: Partition, avars: Sequence[float]) -> float:
    """S_{c,d}(lambda, mu; a) with zero for non-nested shapes."""
    if d == 1:
        outer, inner = mu, lam
    else:
        outer, inner = lam, mu
    if not outer.contains(inner):
        return 0.0
    if c == "e":
        outer, inner = outer.conjugate(), inner.conjugate()
    return complex(skew_schur(outer, list(avars), inner)).real


def partitions_up_to(size: int) -> list[Partition]:
    out = [Partition()]

    def rec(prefix, remaining, cap):
        for v in range(min(cap, remaining), 0, -1):
            p = prefix + [v]
            out.append(Partition(p))
            rec(p, remaining - v, v)

    rec([], size, size)
    return out


def enumerate_schur_process(spec: SchurProcessSpec, max_size: int) -> list[tuple[float, tuple]]:
    """(probability, (lambda^(L+1), ..., lambda^(R-1))) over partitions of size
    <= max_size, normalized by the exact partition function.

    The neglected mass is bounded by the geometric tail of the weights.
    """
    parts = partitions_up_to(max_size)
    steps = len(spec.params)
    Z = schur_process_normalization(spec)
    cache: dict = {}

    def w(k, lam, mu):
        key = (k, lam.parts, mu.parts)
        if key not in cache:
            cache[key] = schur_transition_weight(spec.c[k], spec.d[k], lam, mu, spec.params[k])
        return cache[key]

    out = []
    empty = Partition()

    def rec(k, prev, acc, weight):
        if k == steps - 1:
            wt = weight * w(k, prev, empty)
            if wt:
                out.append((wt / Z, tuple(acc)))
            return
        for lam in parts:
            wt = w(k, prev, lam)
            if wt:
                rec(k + 1, lam, acc + [lam], weight * wt)

    rec(0, empty, [], 1.0)
    return out


def schur_particles(spec: SchurProcessSpec, lams: Sequence[Partition], depth: int) -> frozenset:
    """Occupied sites (k, x) with x = lambda_j - j + shift for j <= depth."""
    pts = set()
    for k, lam in enumerate(lams, start=spec.L + 1):
        for x in lam.particles(depth, spec.shift):
            pts.add((k, x))
    return frozenset(pts)

