"""Aztec diamond as a particle process on the lines 1..2n-1.

Line r of the particle picture is the column x1 = r of the dimer graph.  The
particle at position u on line r sits at the vertex (r, r + 1 - 2u); it is
present when that vertex is matched across the column pair (2j, 2j+1), i.e. a
black vertex on an even line matched to the right, or a white vertex on an odd
line matched to the left.  Positions are x_i = lambda_i - i + 1 for the Schur
process with alternating vertical strips (even -> odd line) and horizontal
strip removals (odd -> even line).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..dpp import KernelEvaluator
from ..kasteleyn import (
    DimerConfiguration,
    KasteleynMatrix,
    WeightedBipartitePlanarGraph,
    build_aztec,
    edge_probabilities,
    enumerate_matchings,
    matching_weight,
)
from ..lgv import TransitionEnsemble, general_kernel
from ..quadrature import circle_integral, nested_circle_integral

__all__ = [
    "AztecEnsembleSpec",
    "aztec_transition",
    "aztec_ensemble",
    "aztec_kernel",
    "aztec_ground_set",
    "aztec_particle_map",
    "aztec_tiling_from_particles",
    "particle_vertex",
    "kenyon_particle_correlation",
    "enumerate_particle_law",
]


@dataclass(frozen=True)
class AztecEnsembleSpec:
    n: int
    a: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.a > 0:
            raise ValueError("a must be positive")


def aztec_transition(a):
    """p_{r,r+1}: one optional up-step of weight a from even lines, a geometric
    down-jump from odd lines."""

    def p(r, x, y):
        if r % 2 == 0:
            return a if y - x == 1 else (1 if y == x else 0)
        return a ** (x - y) if y <= x else 0

    return p


def aztec_ensemble(spec: AztecEnsembleSpec, exact: bool = False) -> TransitionEnsemble:
    """n paths from and to 1 - i, i = 1..n, kept at or above 1 - n.

    The floor replaces the frozen paths below; without it the lowest path
    could dip and return, which is a different model.
    """
    n = spec.n
    pts = [1 - i for i in range(1, n + 1)]
    return TransitionEnsemble(
        L=0,
        R=2 * n,
        transition=aztec_transition(spec.a),
        x_left=pts,
        x_right=pts,
        window=range(n, -n, -1),
        exact=exact,
    )


def aztec_ground_set(n: int) -> list[tuple[int, int]]:
    """Sites (r, u) that can be occupied or empty, r = 1..2n-1."""
    return [(r, u) for r in range(1, 2 * n) for u in range(r // 2 - n + 1, (r + 1) // 2 + 1)]


def particle_vertex(n: int, r: int, u: int) -> tuple[int, int]:
    return (r, r + 1 - 2 * u)


def _default_circles(a: float):
    # z circle holds 0 and a but not -1/a; w circle holds the z circle
    c = a / 2
    return (c, a / 2 + 0.4 / a), (c, a / 2 + 0.7 / a)


def aztec_kernel(
    spec: AztecEnsembleSpec,
    form: int = 1,
    radii: tuple[float, float] | None = None,
    tol: float = 1e-12,
) -> KernelEvaluator:
    """K^OneAz(r, u; s, v) by contour quadrature.

    ``form=2`` uses the variables z -> -1/z, w -> -1/w, and returns the same
    kernel (the (-1)^{u-v} gauge is undone).  ``radii`` gives circles centered
    at 0 with a < rho1 < rho2 < 1/a (form 1) or a < rho3 < rho1 < 1/a (form 2,
    passed as (rho1, rho3)); by default circles centered at a/2 are used, which
    also work for a = 1.
    """
    n, a = spec.n, spec.a
    if radii is not None:
        r1, r2 = radii
        if not (a < r1 < 1 / a and a < r2 < 1 / a):
            raise ValueError(f"radii must lie in ({a}, {1 / a})")
        if form == 1 and not r1 < r2:
            raise ValueError("need rho1 < rho2")
        if form == 2 and not r2 < r1:
            raise ValueError("need rho3 < rho1")
        inner, outer = ((0, r1), (0, r2)) if form == 1 else ((0, r2), (0, r1))
    else:
        inner, outer = _default_circles(a)

    def K1(x, y):
        (R, u), (S, v) = x, y
        r, e1 = divmod(R, 2)
        s, e2 = divmod(S, 2)
        val = 0j
        if R < S:
            val -= circle_integral(
                lambda z: z ** (u - v) * (1 + a * z) ** (s - r + e2 - e1) / (1 - a / z) ** (s - r) / z,
                inner if radii is None else (0, 1.0),
                tol,
            )

        def f(z, w):
            return (
                z ** (u - 1) / (w**v * (w - z))
                * (1 - a / w) ** (n - s) * (1 + a * w) ** (s + e2)
                / ((1 - a / z) ** (n - r) * (1 + a * z) ** (r + e1))
            )

        return val + nested_circle_integral(f, inner, outer, tol)

    def K2(x, y):
        (R, u), (S, v) = x, y
        r, e1 = divmod(R, 2)
        s, e2 = divmod(S, 2)
        val = 0j
        if R < S:
            val -= circle_integral(
                lambda z: z ** (v - u) * (1 + a * z) ** (r - s) / (1 - a / z) ** (r - s + e1 - e2) / z,
                outer if radii is None else (0, 1.0),
                tol,
            )

        def f(w, z):
            return (
                w ** (v - 1) / (z**u * (z - w))
                * (1 + a * w) ** (n - s) * (1 - a / w) ** (s + e2)
                / ((1 + a * z) ** (n - r) * (1 - a / z) ** (r + e1))
            )

        return (-1) ** ((u - v) % 2) * (val + nested_circle_integral(f, inner, outer, tol))

    if form == 1:
        return KernelEvaluator(K1, name="aztec-contour", n=n, a=a)
    if form == 2:
        return KernelEvaluator(K2, name="aztec-contour-reflected", n=n, a=a)
    raise ValueError("form must be 1 or 2")


def aztec_particle_map(g: WeightedBipartitePlanarGraph, config: DimerConfiguration) -> frozenset:
    """Occupied sites (r, u) of a tiling of the Aztec diamond of size n."""
    if g.name not in ("aztec", "two-periodic"):
        raise ValueError("not an Aztec diamond graph")
    if not config.is_perfect(g):
        raise ValueError("configuration is not a perfect matching")
    n = g.params["n"]
    out = set()
    for e in config.edges:
        bi, wi, _ = g.edges[e]
        b, w = g.black[bi], g.white[wi]
        if w[0] < b[0]:
            continue
        # a cross edge of the pair (2j, 2j+1) carries a particle at both ends
        for p in (b, w):
            if 0 < p[0] < 2 * n:
                out.add((p[0], (p[0] - p[1] + 1) // 2))
    return frozenset(out)


def aztec_tiling_from_particles(g: WeightedBipartitePlanarGraph, particles) -> DimerConfiguration:
    """Inverse of ``aztec_particle_map``.

    The sites fix which vertices are matched across each column pair
    (2j, 2j+1); column 0 always is, column 2n never is.  All other vertices are
    matched across the pairs (2j+1, 2j+2).  Inside a column pair the matching
    of a given vertex set is the sorted pairing, since edges only join
    neighbours in x2.
    """
    n = g.params["n"]
    cross = {particle_vertex(n, r, u) for (r, u) in particles}
    edges = []
    for x1 in range(2 * n):
        if x1 % 2 == 0:
            left = [p for p in _column(g, x1, True) if x1 == 0 or p in cross]
            right = [p for p in _column(g, x1 + 1, False) if p in cross]
            edges += _sorted_pairing(g, left, right)
        else:
            left = [p for p in _column(g, x1, False) if p not in cross]
            right = [p for p in _column(g, x1 + 1, True) if x1 + 1 == 2 * n or p not in cross]
            edges += _sorted_pairing(g, right, left)
    cfg = DimerConfiguration.from_edges(edges)
    if not cfg.is_perfect(g):
        raise ValueError("particle configuration does not come from a tiling")
    return cfg


def _column(g, x1, black):
    pts = g.black if black else g.white
    return sorted(p for p in pts if p[0] == x1)


def _sorted_pairing(g, blacks, whites):
    if len(blacks) != len(whites):
        raise ValueError("particle configuration does not come from a tiling")
    out = []
    for b, w in zip(blacks, whites):
        if abs(b[1] - w[1]) != 1:
            raise ValueError("particle configuration does not come from a tiling")
        out.append(g.edge_between(b, w))
    return out


def kenyon_particle_correlation(K: KasteleynMatrix, sites) -> float:
    """Probability that all sites are occupied, summed over the cross edges
    that realise each site."""
    g = K.graph
    n = g.params["n"]
    choices = []
    for (r, u) in sites:
        p = particle_vertex(n, r, u)
        if r % 2 == 0:
            opts = [(p, (r + 1, p[1] + d)) for d in (1, -1)]
        else:
            opts = [((r - 1, p[1] + d), p) for d in (1, -1)]
        opts = [(b, w) for b, w in opts if b in g.black_index and w in g.white_index]
        choices.append(opts)
    total = 0.0
    for combo in itertools.product(*choices):
        es = sorted({g.edge_between(b, w) for b, w in combo})
        bs = [g.edges[e][0] for e in es]
        ws = [g.edges[e][1] for e in es]
        if len(set(bs)) < len(bs) or len(set(ws)) < len(ws):
            continue
        total += edge_probabilities(K, es)
    return total


def enumerate_particle_law(spec: AztecEnsembleSpec) -> list[tuple[float, frozenset]]:
    """(probability, occupied sites) for every tiling; exhaustive."""
    g, _ = build_aztec(spec.n, spec.a)
    cfgs = enumerate_matchings(g)
    ws = [float(matching_weight(g, c)) for c in cfgs]
    Z = sum(ws)
    return [(w / Z, aztec_particle_map(g, c)) for w, c in zip(ws, cfgs)]
