"""Dimer models on planar bipartite graphs via Kasteleyn matrices.

Aztec diamond coordinates: for size n, black vertices are (even, odd) points
with 0 <= x1 <= 2n, 1 <= x2 <= 2n-1 and white vertices are (odd, even) points
with 1 <= x1 <= 2n-1, 0 <= x2 <= 2n.  Edges join points differing by
+-e1 = +-(1, 1) (horizontal dominoes) or +-e2 = +-(-1, 1) (vertical dominoes).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .dpp import FiniteKernel
from .symfunc import exact_det

__all__ = [
    "WeightedBipartitePlanarGraph",
    "KasteleynMatrix",
    "DimerConfiguration",
    "HeightFunction",
    "build_aztec",
    "build_two_periodic_aztec",
    "face_sign_products",
    "check_face_signs",
    "cycle_sign_product",
    "check_cycle_sign",
    "enclosing_cycles",
    "partition_function",
    "exact_partition_function",
    "edge_probabilities",
    "dimer_correlation_kernel",
    "enumerate_matchings",
    "matching_weight",
    "height_function",
    "aztec_faces",
    "domino_type",
    "graph_to_json",
    "graph_from_json",
    "tiling_svg",
    "height_svg",
]

E1 = (1, 1)
E2 = (-1, 1)


@dataclass
class WeightedBipartitePlanarGraph:
    black: list
    white: list
    edges: list  # (black index, white index, weight)
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.black = [tuple(b) for b in self.black]
        self.white = [tuple(w) for w in self.white]
        self.black_index = {b: i for i, b in enumerate(self.black)}
        self.white_index = {w: i for i, w in enumerate(self.white)}
        self.edge_index = {(b, w): k for k, (b, w, _) in enumerate(self.edges)}
        self.adj_black = [[] for _ in self.black]
        self.adj_white = [[] for _ in self.white]
        for k, (b, w, _) in enumerate(self.edges):
            self.adj_black[b].append(k)
            self.adj_white[w].append(k)

    def has_edge(self, b: int, w: int) -> bool:
        return (b, w) in self.edge_index

    def edge_between(self, bpt, wpt) -> int:
        key = (self.black_index[tuple(bpt)], self.white_index[tuple(wpt)])
        if key not in self.edge_index:
            raise KeyError(f"no edge between {bpt} and {wpt}")
        return self.edge_index[key]

    def coords(self, color: str, i: int):
        return self.black[i] if color == "b" else self.white[i]

    @cached_property
    def faces(self) -> list[list[tuple[str, int]]]:
        """Bounded faces as cyclic vertex lists, found from the planar embedding."""
        return _planar_faces(self)

    def check_structure(self) -> None:
        if not _connected(self):
            raise ValueError("graph is not connected")
        for face in self.faces:
            colors = [c for c, _ in face]
            if any(colors[i] == colors[(i + 1) % len(colors)] for i in range(len(colors))):
                raise ValueError(f"face {face} does not alternate colors")


def _connected(g: WeightedBipartitePlanarGraph) -> bool:
    if not g.black:
        return True
    seen_b, seen_w = {0}, set()
    stack = [("b", 0)]
    while stack:
        c, i = stack.pop()
        if c == "b":
            for k in g.adj_black[i]:
                w = g.edges[k][1]
                if w not in seen_w:
                    seen_w.add(w)
                    stack.append(("w", w))
        else:
            for k in g.adj_white[i]:
                b = g.edges[k][0]
                if b not in seen_b:
                    seen_b.add(b)
                    stack.append(("b", b))
    return len(seen_b) == len(g.black) and len(seen_w) == len(g.white)


def _planar_faces(g: WeightedBipartitePlanarGraph):
    pos = {("b", i): np.array(p, float) for i, p in enumerate(g.black)}
    pos.update({("w", i): np.array(p, float) for i, p in enumerate(g.white)})
    nbrs: dict = {v: [] for v in pos}
    for b, w, _ in g.edges:
        nbrs[("b", b)].append(("w", w))
        nbrs[("w", w)].append(("b", b))
    order = {}
    for v, ns in nbrs.items():
        ang = [math.atan2(*(pos[u] - pos[v])[::-1]) for u in ns]
        order[v] = [u for _, u in sorted(zip(ang, ns))]
    seen = set()
    faces = []
    for v in nbrs:
        for u in nbrs[v]:
            if (v, u) in seen:
                continue
            cyc = []
            a, b = v, u
            while (a, b) not in seen:
                seen.add((a, b))
                cyc.append(a)
                ring = order[b]
                k = ring.index(a)
                a, b = b, ring[(k - 1) % len(ring)]
            area = 0.0
            for i in range(len(cyc)):
                p, q = pos[cyc[i]], pos[cyc[(i + 1) % len(cyc)]]
                area += p[0] * q[1] - p[1] * q[0]
            faces.append((area, cyc))
    # traversal keeps faces on the left, so bounded faces are counter-clockwise
    return [cyc for area, cyc in faces if area > 1e-12]


class KasteleynMatrix:
    """Complex black-by-white matrix with entries sign(e) * weight(e).

    ``weights`` keeps the exact edge weights; ``sign_powers`` holds k with
    sign = i^k when all signs are fourth roots of unity.
    """

    def __init__(self, graph: WeightedBipartitePlanarGraph, sign_powers: Sequence[int]):
        self.graph = graph
        self.sign_powers = [int(k) % 4 for k in sign_powers]
        nb, nw = len(graph.black), len(graph.white)
        rows, cols, vals = [], [], []
        for (b, w, wt), k in zip(graph.edges, self.sign_powers):
            rows.append(b)
            cols.append(w)
            vals.append(complex(1j**k) * float(wt))
        self.sparse = sp.csc_matrix((np.array(vals, complex), (rows, cols)), shape=(nb, nw))

    @property
    def entries(self) -> np.ndarray:
        return self.sparse.toarray()

    def sign(self, edge: int) -> complex:
        return complex(1j ** self.sign_powers[edge])

    def entry(self, edge: int) -> complex:
        return self.sign(edge) * float(self.graph.edges[edge][2])

    @cached_property
    def _lu(self):
        return spla.splu(self.sparse.tocsc())

    def inverse_columns(self, black_indices: Iterable[int]) -> np.ndarray:
        """Columns K^{-1}(., b) for the requested black vertices."""
        idx = list(black_indices)
        rhs = np.zeros((self.sparse.shape[0], len(idx)), complex)
        for j, b in enumerate(idx):
            rhs[b, j] = 1.0
        return self._lu.solve(rhs)

    @cached_property
    def inverse(self) -> np.ndarray:
        """Dense inverse, white by black."""
        return self.inverse_columns(range(self.sparse.shape[0]))

    def inverse_entry(self, w: int, b: int) -> complex:
        return complex(self.inverse_columns([b])[w, 0])


@dataclass(frozen=True)
class DimerConfiguration:
    edges: frozenset  # edge indices

    @classmethod
    def from_edges(cls, edges: Iterable[int]) -> "DimerConfiguration":
        return cls(frozenset(int(e) for e in edges))

    def matching(self, g: WeightedBipartitePlanarGraph) -> dict:
        return {g.edges[e][0]: g.edges[e][1] for e in self.edges}

    def is_perfect(self, g: WeightedBipartitePlanarGraph) -> bool:
        bs = [g.edges[e][0] for e in self.edges]
        ws = [g.edges[e][1] for e in self.edges]
        return (
            len(set(bs)) == len(bs) == len(g.black)
            and len(set(ws)) == len(ws) == len(g.white)
        )


@dataclass
class HeightFunction:
    values: dict  # face center -> int


def _aztec_vertices(n: int):
    black = [(x1, x2) for x1 in range(0, 2 * n + 1, 2) for x2 in range(1, 2 * n, 2)]
    white = [(x1, x2) for x1 in range(1, 2 * n, 2) for x2 in range(0, 2 * n + 1, 2)]
    return black, white


def _aztec_edges(black, white, weight_fn):
    widx = {w: i for i, w in enumerate(white)}
    edges, powers = [], []
    for bi, (x1, x2) in enumerate(black):
        for d in (E1, E2, (-E1[0], -E1[1]), (-E2[0], -E2[1])):
            y = (x1 + d[0], x2 + d[1])
            if y in widx:
                wt, k = weight_fn((x1, x2), d)
                edges.append((bi, widx[y], wt))
                powers.append(k)
    return edges, powers


def build_aztec(n: int, a=1):
    """Aztec diamond graph of size n: weight 1 and sign 1 on horizontal edges,
    weight a and sign i on vertical ones."""
    if n < 1:
        raise ValueError("n must be positive")
    if not a > 0:
        raise ValueError("a must be positive")
    black, white = _aztec_vertices(n)

    def wf(b, d):
        if d in (E1, (-1, -1)):
            return 1, 0
        return a, 1

    edges, powers = _aztec_edges(black, white, wf)
    g = WeightedBipartitePlanarGraph(black, white, edges, name="aztec", params={"n": n, "a": a})
    return g, KasteleynMatrix(g, powers)


def tp_class(p) -> int:
    """Class index j with (x1 + x2) mod 4 = 2j + 1."""
    return ((p[0] + p[1]) % 4 - 1) // 2


def build_two_periodic_aztec(m: int | None = None, a=Fraction(1, 2), n: int | None = None):
    """Two-periodic Aztec diamond of size n = 4m."""
    if n is None:
        if m is None or m < 1:
            raise ValueError("m must be a positive integer")
        n = 4 * m
    elif n % 4:
        raise ValueError("size must be divisible by 4")
    if not a > 0:
        raise ValueError("a must be positive")
    black, white = _aztec_vertices(n)

    def wf(b, d):
        j = tp_class(b)
        if d == E1:
            return a * (1 - j) + j, 0
        if d == E2:
            return a * j + (1 - j), 1
        if d == (-1, -1):
            return a * j + (1 - j), 0
        return a * (1 - j) + j, 1

    edges, powers = _aztec_edges(black, white, wf)
    g = WeightedBipartitePlanarGraph(black, white, edges, name="two-periodic", params={"n": n, "a": a})
    return g, KasteleynMatrix(g, powers)


def _alternating_product(K: KasteleynMatrix, cycle) -> complex:
    g = K.graph
    prod = 1.0 + 0j
    L = len(cycle)
    for i in range(L):
        u, v = cycle[i], cycle[(i + 1) % L]
        b, w = (u, v) if u[0] == "b" else (v, u)
        s = K.sign(g.edge_index[(b[1], w[1])])
        prod = prod * s if i % 2 == 0 else prod / s
    return prod


def face_sign_products(K: KasteleynMatrix) -> list[tuple[list, complex, int]]:
    """(face, alternating sign product, expected value) for each bounded face."""
    out = []
    for face in K.graph.faces:
        k = len(face) // 2
        out.append((face, _alternating_product(K, face), (-1) ** (k + 1)))
    return out


def check_face_signs(K: KasteleynMatrix, tol: float = 1e-12) -> bool:
    return all(abs(v - e) <= tol for _, v, e in face_sign_products(K))


def _enclosed_count(g, cycle) -> int:
    poly = [g.black[i] if c == "b" else g.white[i] for c, i in cycle]
    on = set(cycle)
    cnt = 0
    for color, pts in (("b", g.black), ("w", g.white)):
        for i, p in enumerate(pts):
            if (color, i) in on:
                continue
            if _point_in_polygon(p, poly):
                cnt += 1
    return cnt


def _point_in_polygon(p, poly) -> bool:
    x, y = p
    inside = False
    for i in range(len(poly)):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % len(poly)]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def cycle_sign_product(K: KasteleynMatrix, cycle) -> tuple[complex, int, int]:
    """Alternating product along a simple cycle, with k and enclosed count l."""
    return _alternating_product(K, cycle), len(cycle) // 2, _enclosed_count(K.graph, cycle)


def check_cycle_sign(K: KasteleynMatrix, cycle, tol: float = 1e-12) -> bool:
    val, k, l = cycle_sign_product(K, cycle)
    return abs(val - (-1) ** (k + l + 1)) <= tol


def enclosing_cycles(g: WeightedBipartitePlanarGraph, max_cycles: int = 50, rng=None) -> list:
    """Boundaries of unions of faces around single interior vertices and of
    face pairs; simple cycles enclosing 1 or 0 vertices."""
    out = []
    verts = [("b", i) for i in range(len(g.black))] + [("w", i) for i in range(len(g.white))]
    faces = g.faces
    by_vertex: dict = {}
    for fi, f in enumerate(faces):
        for v in f:
            by_vertex.setdefault(v, []).append(fi)
    for v in verts:
        fs = by_vertex.get(v, [])
        deg = len(g.adj_black[v[1]]) if v[0] == "b" else len(g.adj_white[v[1]])
        if len(fs) == deg and deg >= 3:
            cyc = _union_boundary(g, [faces[i] for i in fs])
            if cyc is not None:
                out.append(cyc)
        if len(out) >= max_cycles // 2:
            break
    for fi in range(min(len(faces), max_cycles)):
        for fj in range(fi + 1, len(faces)):
            if len(set(faces[fi]) & set(faces[fj])) == 2:
                cyc = _union_boundary(g, [faces[fi], faces[fj]])
                if cyc is not None:
                    out.append(cyc)
                break
        if len(out) >= max_cycles:
            break
    return out


def _union_boundary(g, faces):
    """Boundary cycle of a union of faces (None if not a single simple cycle)."""
    count: dict = {}
    for f in faces:
        for i in range(len(f)):
            e = frozenset((f[i], f[(i + 1) % len(f)]))
            count[e] = count.get(e, 0) + 1
    bd = [tuple(e) for e, c in count.items() if c == 1]
    nb: dict = {}
    for u, v in bd:
        nb.setdefault(u, []).append(v)
        nb.setdefault(v, []).append(u)
    if any(len(x) != 2 for x in nb.values()):
        return None
    start = bd[0][0]
    cyc = [start]
    prev, cur = None, start
    while True:
        a, b = nb[cur]
        nxt = a if a != prev else b
        if nxt == start:
            break
        cyc.append(nxt)
        prev, cur = cur, nxt
    return cyc if len(cyc) == len(nb) else None


def _real_gauge(K: KasteleynMatrix):
    """Row/column phase exponents f, g with f(b) + g(w) + k_e even on all edges."""
    g = K.graph
    f = [None] * len(g.black)
    h = [None] * len(g.white)
    for start in range(len(g.black)):
        if f[start] is not None:
            continue
        f[start] = 0
        stack = [("b", start)]
        while stack:
            c, i = stack.pop()
            ks = g.adj_black[i] if c == "b" else g.adj_white[i]
            for e in ks:
                b, w, _ = g.edges[e]
                k = K.sign_powers[e]
                if c == "b":
                    want = (-f[b] - k) % 4
                    if h[w] is None:
                        h[w] = want
                        stack.append(("w", w))
                    elif (h[w] - want) % 2:
                        return None
                else:
                    want = (-h[w] - k) % 4
                    if f[b] is None:
                        f[b] = want
                        stack.append(("b", b))
                    elif (f[b] - want) % 2:
                        return None
    for w in range(len(h)):
        if h[w] is None:
            h[w] = 0
    return f, h


def exact_partition_function(K: KasteleynMatrix):
    """|det K| in exact arithmetic (weights must be int or Fraction)."""
    g = K.graph
    n = len(g.black)
    if n != len(g.white):
        return 0
    gauge = _real_gauge(K)
    if gauge is not None:
        f, h = gauge
        rows = [[0] * n for _ in range(n)]
        for e, (b, w, wt) in enumerate(g.edges):
            k = (f[b] + h[w] + K.sign_powers[e]) % 4
            rows[b][w] = Fraction(wt) * (1 if k == 0 else -1)
        d = exact_det(rows)
        return abs(d)
    from sympy import Rational, sqrt
    from sympy.polys.domains import QQ_I
    from sympy.polys.matrices import DomainMatrix

    rows = [[QQ_I(0)] * n for _ in range(n)]
    units = [QQ_I(1), QQ_I(0, 1), QQ_I(-1), QQ_I(0, -1)]
    for e, (b, w, wt) in enumerate(g.edges):
        fr = Fraction(wt)
        rows[b][w] = units[K.sign_powers[e]] * QQ_I(Rational(fr.numerator, fr.denominator))
    d = DomainMatrix(rows, (n, n), QQ_I).det()
    re, im = Fraction(str(d.x)), Fraction(str(d.y))
    mod2 = re * re + im * im
    num, den = mod2.numerator, mod2.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return sqrt(Rational(num, den))


def partition_function(K: KasteleynMatrix) -> float:
    """|det K|, which equals the weighted number of perfect matchings."""
    g = K.graph
    if len(g.black) != len(g.white):
        return 0.0
    try:
        lu = K._lu
    except RuntimeError:
        return 0.0
    d = np.concatenate([lu.U.diagonal()])
    return float(np.exp(np.sum(np.log(np.abs(d)))))


def _edge_list(K, edges):
    g = K.graph
    out = []
    for e in edges:
        if isinstance(e, (int, np.integer)):
            if not 0 <= e < len(g.edges):
                raise KeyError(f"edge index {e} out of range")
            out.append(int(e))
        else:
            b, w = e
            if isinstance(b, (int, np.integer)):
                key = (int(b), int(w))
                if key not in g.edge_index:
                    raise KeyError(f"{e} is not an edge")
                out.append(g.edge_index[key])
            else:
                out.append(g.edge_between(b, w))
    return out


def edge_probabilities(K: KasteleynMatrix, edges) -> float:
    """Probability that all listed edges are covered: prod K(b_i, w_i) det(K^{-1}(w_i, b_j))."""
    es = _edge_list(K, edges)
    if not es:
        return 1.0
    g = K.graph
    bs = [g.edges[e][0] for e in es]
    ws = [g.edges[e][1] for e in es]
    if len(set(bs)) < len(bs) or len(set(ws)) < len(ws):
        return 0.0
    cols = K.inverse_columns(bs)
    sub = cols[ws, :]
    val = np.prod([K.entry(e) for e in es]) * np.linalg.det(sub)
    return float(min(1.0, max(0.0, val.real)))


def dimer_correlation_kernel(K: KasteleynMatrix, edges=None) -> FiniteKernel:
    """L(e_i, e_j) = K(b_i, w_i) K^{-1}(w_i, b_j) on the given edges (default all)."""
    g = K.graph
    es = list(range(len(g.edges))) if edges is None else _edge_list(K, edges)
    bs = [g.edges[e][0] for e in es]
    ws = [g.edges[e][1] for e in es]
    ub = sorted(set(bs))
    pos = {b: j for j, b in enumerate(ub)}
    cols = K.inverse_columns(ub)
    diag = np.array([K.entry(e) for e in es])
    M = diag[:, None] * cols[np.ix_(ws, [pos[b] for b in bs])]
    return FiniteKernel(es, M)


def enumerate_matchings(g: WeightedBipartitePlanarGraph, limit: int = 10**6) -> list[DimerConfiguration]:
    """All perfect matchings by backtracking over black vertices."""
    out = []
    used = [False] * len(g.white)
    order = sorted(range(len(g.black)), key=lambda b: len(g.adj_black[b]))
    chosen: list = []

    def rec(i):
        if len(out) >= limit:
            raise RuntimeError("too many matchings")
        if i == len(order):
            out.append(DimerConfiguration.from_edges(chosen))
            return
        for e in g.adj_black[order[i]]:
            w = g.edges[e][1]
            if not used[w]:
                used[w] = True
                chosen.append(e)
                rec(i + 1)
                chosen.pop()
                used[w] = False

    if len(g.black) == len(g.white):
        rec(0)
    return out


def matching_weight(g: WeightedBipartitePlanarGraph, config: DimerConfiguration):
    w = 1
    for e in config.edges:
        w = w * g.edges[e][2]
    return w


def aztec_faces(n: int) -> list[tuple[int, int]]:
    """Face centers of the size n+1 Aztec graph, in size-n coordinates."""
    return [(x1, x2) for x1 in range(0, 2 * n + 1) for x2 in range(0, 2 * n + 1) if (x1 + x2) % 2 == 0]


def height_function(g: WeightedBipartitePlanarGraph, config: DimerConfiguration) -> HeightFunction:
    """Heights on the faces of the size n+1 Aztec graph, zero at face (0, 0).

    Crossing from a face to a neighbour changes the height by +3 (-3) when the
    crossed edge is a dimer with its white end on the right (left), and by +1
    (-1) when it is not a dimer and the white end is on the left (right).
    """
    if g.name not in ("aztec", "two-periodic"):
        raise ValueError("height functions are implemented for Aztec diamond graphs")
    if not config.is_perfect(g):
        raise ValueError("configuration is not a perfect matching")
    n = g.params["n"]
    faces = set(aztec_faces(n))
    dimers = {(g.black[g.edges[e][0]], g.white[g.edges[e][1]]) for e in config.edges}

    def step(f, d):
        mx, my = f[0] + d[0] / 2, f[1] + d[1] / 2
        left = (int(round(mx - d[1] / 2)), int(round(my + d[0] / 2)))
        right = (int(round(mx + d[1] / 2)), int(round(my - d[0] / 2)))
        white_left = left[0] % 2 == 1
        wv, bv = (left, right) if white_left else (right, left)
        if (bv, wv) in dimers:
            return -3 if white_left else 3
        return 1 if white_left else -1

    dirs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    start = min(faces)
    h = {start: 0}
    stack = [start]
    while stack:
        f = stack.pop()
        for d in dirs:
            nf = (f[0] + d[0], f[1] + d[1])
            if nf in faces and nf not in h:
                h[nf] = h[f] + step(f, d)
                stack.append(nf)
    for f in faces:
        for d in dirs:
            nf = (f[0] + d[0], f[1] + d[1])
            if nf in faces and h[nf] - h[f] != step(f, d):
                raise AssertionError(f"inconsistent height difference between {f} and {nf}")
    return HeightFunction(h)


def domino_type(g: WeightedBipartitePlanarGraph, edge: int) -> int:
    """0/1: horizontal with black square left/right; 2/3: vertical with black square bottom/top."""
    b, w, _ = g.edges[edge]
    bx, by = g.black[b]
    wx, wy = g.white[w]
    d = (wx - bx, wy - by)
    # screen coordinates: X = (x1 + x2) / 2, Y = (x2 - x1) / 2
    if d in (E1, (-1, -1)):
        return 0 if d == E1 else 1
    return 2 if d == E2 else 3


def graph_to_json(g: WeightedBipartitePlanarGraph, K: KasteleynMatrix | None = None) -> str:
    data = {
        "name": g.name,
        "params": {k: str(v) for k, v in g.params.items()},
        "black": [list(b) for b in g.black],
        "white": [list(w) for w in g.white],
        "edges": [[b, w, str(wt)] for b, w, wt in g.edges],
    }
    if K is not None:
        data["sign_powers"] = K.sign_powers
    return json.dumps(data)


def graph_from_json(text: str):
    data = json.loads(text)
    edges = [(int(b), int(w), Fraction(wt)) for b, w, wt in data["edges"]]
    g = WeightedBipartitePlanarGraph(data["black"], data["white"], edges, name=data.get("name", ""),
                                     params=data.get("params", {}))
    if "params" in data and "n" in data["params"]:
        g.params["n"] = int(data["params"]["n"])
    K = KasteleynMatrix(g, data["sign_powers"]) if "sign_powers" in data else None
    return g, K


DOMINO_COLORS = ("#d62728", "#ffbf00", "#1f77b4", "#2ca02c")


def _square(p):
    return ((p[0] + p[1]) / 2, (p[1] - p[0]) / 2)


def tiling_svg(g: WeightedBipartitePlanarGraph, config: DimerConfiguration, scale: float = 10.0,
               comment: str = "") -> str:
    """Dominoes colored by the four types of ``domino_type``."""
    rects = []
    xs, ys = [], []
    for e in sorted(config.edges):
        b, w, _ = g.edges[e]
        cb, cw = _square(g.black[b]), _square(g.white[w])
        x0 = min(cb[0], cw[0]) - 0.5
        y0 = max(cb[1], cw[1]) + 0.5
        wd = abs(cb[0] - cw[0]) + 1
        ht = abs(cb[1] - cw[1]) + 1
        xs += [x0, x0 + wd]
        ys += [y0, y0 - ht]
        rects.append((x0, y0, wd, ht, DOMINO_COLORS[domino_type(g, e)]))
    if not rects:
        return "<svg xmlns='http://www.w3.org/2000/svg'/>"
    minx, maxy = min(xs), max(ys)
    W = (max(xs) - minx) * scale
    H = (maxy - min(ys)) * scale
    parts = [f"<svg xmlns='http://www.w3.org/2000/svg' width='{W:.0f}' height='{H:.0f}' "
             f"viewBox='0 0 {W:.3f} {H:.3f}'>"]
    if comment:
        parts.append(f"<!-- {comment.replace('--', '- -')} -->")
    for x0, y0, wd, ht, col in rects:
        parts.append(f"<rect x='{(x0 - minx) * scale:.3f}' y='{(maxy - y0) * scale:.3f}' "
                     f"width='{wd * scale:.3f}' height='{ht * scale:.3f}' fill='{col}' "
                     f"stroke='black' stroke-width='{scale / 20:.3f}'/>")
    parts.append("</svg>")
    return "\n".join(parts)


def height_svg(h: HeightFunction, scale: float = 10.0, comment: str = "") -> str:
    """Grey-level map of the heights, one diamond per face."""
    vals = list(h.values.values())
    lo, hi = min(vals), max(vals)
    span = max(hi - lo, 1)
    pts = {f: _square(f) for f in h.values}
    xs = [p[0] for p in pts.values()]
    ys = [p[1] for p in pts.values()]
    minx, maxy = min(xs) - 0.5, max(ys) + 0.5
    W = (max(xs) + 0.5 - minx) * scale
    H = (maxy - min(ys) + 0.5) * scale
    parts = [f"<svg xmlns='http://www.w3.org/2000/svg' width='{W:.0f}' height='{H:.0f}'>"]
    if comment:
        parts.append(f"<!-- {comment.replace('--', '- -')} -->")
    for f, v in sorted(h.values.items()):
        cx, cy = (pts[f][0] - minx) * scale, (maxy - pts[f][1]) * scale
        g = int(255 * (v - lo) / span)
        r = scale / 2
        parts.append(f"<polygon points='{cx - r:.2f},{cy:.2f} {cx:.2f},{cy - r:.2f} {cx + r:.2f},{cy:.2f} "
                     f"{cx:.2f},{cy + r:.2f}' fill='rgb({g},{g},{g})'/>")
    parts.append("</svg>")
    return "\n".join(parts)
