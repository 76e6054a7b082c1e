"""Double Aztec diamond through its inlier paths.

The inlier paths are M = 2m+1 non-intersecting paths on the lines 0..2n+1
starting and ending at m+1-j.  From even lines a path takes a geometric
down-jump, from odd lines an optional up-step of weight a.  The outlier
particles of the tiling are the holes of the inlier particles, so their kernel
is the dual kernel delta - K.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from ..dpp import KernelEvaluator
from ..quadrature import circle_integral, nested_circle_integral
from ..lgv import TransitionEnsemble, ensemble_configurations, general_kernel
from ..toeplitz import LevelSymbols, SymbolSpec, finite_m_kernel, finite_toeplitz_kernel

__all__ = [
    "DoubleAztecSpec",
    "double_aztec_levels",
    "double_aztec_ensemble",
    "double_aztec_ground_set",
    "double_aztec_kernel",
    "enumerate_outlier_law",
    "reflected_aztec_term",
]


@dataclass(frozen=True)
class DoubleAztecSpec:
    n: int
    m: int
    a: float = 0.5

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ValueError("need n >= 1 and m >= 0")
        if not 0 < self.a < 1:
            raise ValueError("the Toeplitz description needs 0 < a < 1")

    @property
    def lines(self) -> int:
        return 2 * self.n + 1

    @property
    def paths(self) -> int:
        return 2 * self.m + 1


def double_aztec_levels(spec: DoubleAztecSpec) -> LevelSymbols:
    down = SymbolSpec((), ((spec.a, -1),))
    up = SymbolSpec(((-spec.a, 1),), ())
    return LevelSymbols([down if r % 2 == 0 else up for r in range(spec.lines)], L=0, d=spec.m + 1)


def _transition(a):
    def p(r, x, y):
        if r % 2 == 0:
            return a ** (x - y) if y <= x else 0
        return a if y - x == 1 else (1 if y == x else 0)

    return p


def double_aztec_ensemble(spec: DoubleAztecSpec, exact: bool = False) -> TransitionEnsemble:
    """Every path returns to its start, so it moves at most n below the lowest
    or above the highest boundary point; the window is exact."""
    n, m = spec.n, spec.m
    pts = [m + 1 - j for j in range(1, spec.paths + 1)]
    a = spec.a
    if exact:
        from fractions import Fraction

        a = Fraction(str(a))
    return TransitionEnsemble(
        L=0,
        R=spec.lines,
        transition=_transition(a),
        x_left=pts,
        x_right=pts,
        window=range(m + n, -m - n - 1, -1),
        exact=exact,
    )


def double_aztec_ground_set(spec: DoubleAztecSpec) -> list[tuple[int, int]]:
    """Sites (line, position) where an outlier particle may or may not be."""
    n, m = spec.n, spec.m
    return [(r, u) for r in range(1, spec.lines) for u in range(m + n, -m - n - 1, -1)]


def enumerate_outlier_law(spec: DoubleAztecSpec) -> list[tuple[float, frozenset]]:
    """(probability, outlier sites inside the ground set) for every inlier configuration."""
    ens = double_aztec_ensemble(spec, exact=True)
    confs = ensemble_configurations(ens)
    Z = sum(w for w, _ in confs)
    ground = set(double_aztec_ground_set(spec))
    law: dict = defaultdict(float)
    for w, lines in confs:
        occ = {(r, u) for r, xs in enumerate(lines, start=1) for u in xs}
        law[frozenset(ground - occ)] += float(w / Z)
    return [(p, s) for s, p in law.items()]


def double_aztec_kernel(spec: DoubleAztecSpec, route: str = "aztec") -> KernelEvaluator:
    """Outlier kernel.

    route: "aztec" (reflected Aztec kernel of size n+1 minus the resolvent
    correction), "resolvent" (dual kernel of the finite-M Toeplitz ensemble),
    "toeplitz" (delta minus the finite Toeplitz inverse kernel), "general"
    (delta minus the A^{-1} kernel of the path ensemble).
    """
    n, m, a = spec.n, spec.m, spec.a
    levels = double_aztec_levels(spec)
    if route == "resolvent":
        return finite_m_kernel(levels, spec.paths, dual=True)
    if route in ("toeplitz", "general"):
        inner = finite_toeplitz_kernel(levels, spec.paths) if route == "toeplitz" else general_kernel(
            double_aztec_ensemble(spec)
        )

        def Kd(x, y):
            return (1 if x == y else 0) - inner(x, y)

        return KernelEvaluator(Kd, name=f"double-aztec-{route}", n=n, m=m, a=a)
    if route != "aztec":
        raise ValueError(f"unknown route {route!r}")
    corr = finite_m_kernel(levels, spec.paths).parts["correction"]

    def K(x, y):
        (R, u), (S, v) = x, y
        if not (0 < R < spec.lines and 0 < S < spec.lines):
            raise ValueError("line outside 1..2n")
        r, e1 = divmod(R, 2)
        s, e2 = divmod(S, 2)
        reflected = reflected_aztec_term(n + 1, a, (n + 1 - r, -e1, m + 1 - u), (n + 1 - s, -e2, m + 1 - v), S < R)
        return reflected - corr(R, u, S, v)

    return KernelEvaluator(K, name="double-aztec", n=n, m=m, a=a)


def reflected_aztec_term(N: int, a: float, x: tuple, y: tuple, single: bool, tol: float = 1e-12) -> complex:
    """The reflected one-Aztec kernel of size N in the variables z -> -1/z,
    with the line given as (r, e) where e may be -1.

    For e = -1 the exponents are not those of any line of the size-N
    diamond, which is why this is not a call to ``aztec_kernel``.
    """
    r, e1, u = x
    s, e2, v = y
    val = 0j
    if single:
        val -= circle_integral(
            lambda z: z ** (v - u) * (1 + a * z) ** (r - s) / (1 - a / z) ** (r - s + e1 - e2) / z, (0, 1.0), tol
        )

    def f(w, z):
        return (
            w ** (v - 1) / (z**u * (z - w))
            * (1 + a * w) ** (N - s) * (1 - a / w) ** (s + e2)
            / ((1 + a * z) ** (N - r) * (1 - a / z) ** (r + e1))
        )

    return val + nested_circle_integral(f, (0, a ** (1 / 3)), (0, a ** (-1 / 3)), tol)
