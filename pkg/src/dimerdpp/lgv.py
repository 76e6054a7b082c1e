"""Non-intersecting paths: LGV determinants and product-of-determinants kernels."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np

from .dpp import KernelEvaluator
from .symfunc import exact_det

__all__ = [
    "DirectedAcyclicPathGraph",
    "TransitionEnsemble",
    "transition_weight",
    "lgv_weight",
    "non_intersecting_families",
    "is_compatible_plane",
    "general_kernel",
    "kernel_via_cramer",
    "ensemble_configurations",
    "dag_from_json",
]


@dataclass
class DirectedAcyclicPathGraph:
    vertices: list
    edges: dict  # (u, v) -> weight

    def __post_init__(self):
        self.out: dict = {v: [] for v in self.vertices}
        indeg = {v: 0 for v in self.vertices}
        for (u, v), w in self.edges.items():
            if u not in self.out or v not in indeg:
                raise ValueError(f"edge ({u}, {v}) uses an unknown vertex")
            self.out[u].append((v, w))
            indeg[v] += 1
        order, stack = [], [v for v in self.vertices if indeg[v] == 0]
        while stack:
            u = stack.pop()
            order.append(u)
            for v, _ in self.out[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    stack.append(v)
        if len(order) != len(self.vertices):
            raise ValueError("graph has a directed cycle")
        self.order = order
        self.rank = {v: i for i, v in enumerate(order)}

    def paths(self, u, v):
        """All directed paths from u to v as vertex lists."""
        if u == v:
            yield [u]
            return
        for x, _ in self.out[u]:
            if self.rank[x] <= self.rank[v]:
                for rest in self.paths(x, v):
                    yield [u] + rest

    def path_weight(self, path) -> object:
        w = 1
        for a, b in zip(path, path[1:]):
            w = w * self.edges[(a, b)]
        return w


def transition_weight(g: DirectedAcyclicPathGraph, u, v):
    """Sum over directed paths u -> v of the product of edge weights."""
    acc = {u: 1}
    for x in g.order[g.rank[u]:]:
        if x not in acc:
            continue
        if x == v:
            break
        for y, w in g.out[x]:
            acc[y] = acc.get(y, 0) + acc[x] * w
    return acc.get(v, 0)


def lgv_weight(g: DirectedAcyclicPathGraph, u: Sequence, v: Sequence):
    """det(p(u_i, v_j))."""
    m = [[transition_weight(g, a, b) for b in v] for a in u]
    if all(isinstance(x, (int, Fraction)) for row in m for x in row):
        return exact_det(m)
    return complex(np.linalg.det(np.array(m, dtype=complex))) if m else 1


def non_intersecting_families(g: DirectedAcyclicPathGraph, u: Sequence, v: Sequence):
    """Enumerate vertex-disjoint path families u_i -> v_i (brute force)."""
    options = [list(g.paths(a, b)) for a, b in zip(u, v)]
    for fam in itertools.product(*options):
        seen = set()
        ok = True
        for p in fam:
            for x in p:
                if x in seen:
                    ok = False
                    break
                seen.add(x)
            if not ok:
                break
        if ok:
            yield fam


def is_compatible_plane(g: DirectedAcyclicPathGraph, u: Sequence, v: Sequence) -> bool:
    """Brute-force compatibility: for a < a' and b > b', every path u_a -> v_b
    meets every path u_a' -> v_b'."""
    n = len(u)
    for a, a2 in itertools.combinations(range(n), 2):
        for b2, b in itertools.combinations(range(n), 2):
            for p in g.paths(u[a], v[b]):
                sp = set(p)
                for q in g.paths(u[a2], v[b2]):
                    if not sp.intersection(q):
                        return False
    return True


def dag_from_json(data: dict) -> DirectedAcyclicPathGraph:
    """{"vertices": [...], "edges": [[u, v, weight], ...]} with list vertices made tuples."""

    def key(x):
        return tuple(x) if isinstance(x, list) else x

    verts = [key(x) for x in data["vertices"]]
    edges = {(key(a), key(b)): Fraction(str(w)) for a, b, w in data["edges"]}
    return DirectedAcyclicPathGraph(verts, edges)


@dataclass
class TransitionEnsemble:
    """Measure prod_r det(p_{r,r+1}(x_j^r, x_k^{r+1})) on integer positions.

    ``transition(r, x, y)`` gives p_{r,r+1}(x, y).  Positions of all paths must
    stay inside ``window`` (a range of integers); p_{r,s} are then exact
    products of window-restricted transfer matrices.
    """

    L: int
    R: int
    transition: Callable[[int, int, int], object]
    x_left: Sequence[int]
    x_right: Sequence[int]
    window: Sequence[int]
    exact: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.window = list(self.window)
        self.pos = {x: i for i, x in enumerate(self.window)}
        missing = [x for x in list(self.x_left) + list(self.x_right) if x not in self.pos]
        if missing:
            raise ValueError(f"boundary points {missing} are outside the window")
        if len(self.x_left) != len(self.x_right):
            raise ValueError("left and right boundaries must have the same number of points")

    @property
    def M(self) -> int:
        return len(self.x_left)

    def _zero(self, k):
        if self.exact:
            return np.array([[Fraction(0)] * k for _ in range(k)], dtype=object)
        return np.zeros((k, k))

    def step(self, r: int) -> np.ndarray:
        key = ("step", r)
        if key not in self._cache:
            n = len(self.window)
            m = self._zero(n)
            for i, x in enumerate(self.window):
                for j, y in enumerate(self.window):
                    val = self.transition(r, x, y)
                    m[i, j] = Fraction(val) if self.exact else val
            self._cache[key] = m
        return self._cache[key]

    def propagator(self, r: int, s: int) -> np.ndarray:
        """Window matrix of p_{r,s}; zero for r >= s."""
        key = ("prop", r, s)
        if key not in self._cache:
            if r >= s:
                self._cache[key] = self._zero(len(self.window))
            elif s == r + 1:
                self._cache[key] = self.step(r)
            else:
                self._cache[key] = self.propagator(r, s - 1).dot(self.step(s - 1))
        return self._cache[key]

    def p(self, r: int, s: int, x: int, y: int):
        if x not in self.pos or y not in self.pos:
            return 0
        return self.propagator(r, s)[self.pos[x], self.pos[y]]

    def matrix_A(self) -> np.ndarray:
        P = self.propagator(self.L, self.R)
        il = [self.pos[x] for x in self.x_left]
        ir = [self.pos[x] for x in self.x_right]
        return P[np.ix_(il, ir)]

    def partition_function(self):
        A = self.matrix_A()
        if self.exact:
            return exact_det(A.tolist())
        return float(np.linalg.det(A.astype(float)))


def _solve_exact(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B over Fractions by Gauss-Jordan elimination."""
    n = A.shape[0]
    m = [list(A[i]) + list(B[i]) for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / Fraction(m[c][c])
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return np.array([row[n:] for row in m], dtype=object)


def general_kernel(ens: TransitionEnsemble) -> KernelEvaluator:
    """K(r,u;s,v) = -p_{r,s}(u,v) + sum_ij p_{r,R}(u, x_j^R) (A^{-1})_{ji} p_{L,s}(x_i^L, v)."""
    A = ens.matrix_A()
    if ens.exact:
        if exact_det(A.tolist()) == 0:
            raise ValueError("matrix A is singular; the measure cannot be normalized")
    else:
        if abs(np.linalg.det(A.astype(float))) == 0:
            raise ValueError("matrix A is singular; the measure cannot be normalized")
    il = [ens.pos[x] for x in ens.x_left]
    ir = [ens.pos[x] for x in ens.x_right]
    cache: dict = {}

    def right_vec(r):
        # rows u, columns j: p_{r,R}(u, x_j^R), then multiplied by A^{-1}
        if ("rv", r) not in cache:
            P = ens.propagator(r, ens.R)[:, ir]
            if ens.exact:
                X = _solve_exact(A.T, P.T).T
            else:
                import scipy.linalg as sla

                X = sla.solve(A.T.astype(float), P.T.astype(float)).T
            cache[("rv", r)] = X
        return cache[("rv", r)]

    def left_vec(s):
        return ens.propagator(ens.L, s)[il, :]

    def K(x, y):
        (r, u), (s, v) = x, y
        if u not in ens.pos or v not in ens.pos:
            raise KeyError(f"point outside the window: {x}, {y}")
        iu, iv = ens.pos[u], ens.pos[v]
        val = -ens.p(r, s, u, v)
        row = right_vec(r)[iu]
        col = left_vec(s)[:, iv]
        val = val + sum(row[k] * col[k] for k in range(ens.M))
        return val

    return KernelEvaluator(K, name="product-measure", exact=ens.exact)


def kernel_via_cramer(
    ens: TransitionEnsemble,
    shift_op: Callable[[int, int], Sequence[tuple[object, int]]],
    g: Callable[[int, int], int],
    p_LR: Callable[[int, int], object] | None = None,
) -> KernelEvaluator:
    """Kernel through column-replaced determinants.

    ``shift_op(s, v)`` lists pairs (c, v') so that the operator T_v acts as
    f -> sum c f(v'); ``g(s, v')`` is the replacement point, so that
    p_{L,s}(x, v) = sum c p_{L,R}(x, g(s, v')).  ``p_LR`` evaluates
    p_{L,R}(x, y) for points outside the window (default: the ensemble's).
    """
    pLR = p_LR or (lambda x, y: ens.p(ens.L, ens.R, x, y))
    A = [[pLR(x, y) for y in ens.x_right] for x in ens.x_left]
    detA = exact_det(A) if ens.exact else np.linalg.det(np.array(A, dtype=float))
    M = ens.M

    def ratio(j, y):
        col = [pLR(x, y) for x in ens.x_left]
        Aj = [row[:j] + [col[i]] + row[j + 1:] for i, row in enumerate(A)]
        d = exact_det(Aj) if ens.exact else np.linalg.det(np.array(Aj, dtype=float))
        return d / detA

    def K(x, y):
        (r, u), (s, v) = x, y
        tot = 0
        for c, vv in shift_op(s, v):
            gy = g(s, vv)
            tot = tot + c * sum(ens.p(r, ens.R, u, ens.x_right[j]) * ratio(j, gy) for j in range(M))
        return -ens.p(r, s, u, v) + tot

    return KernelEvaluator(K, name="cramer", exact=ens.exact)


def ensemble_configurations(ens: TransitionEnsemble):
    """Enumerate (weight, lines) over all M-tuples on interior lines with
    nonzero product of determinants.  Brute force oracle for small cases."""
    M = ens.M
    lines = list(range(ens.L + 1, ens.R))
    det = (lambda m: exact_det(m)) if ens.exact else (lambda m: np.linalg.det(np.array(m, dtype=float)))
    out = []

    def rec(r, prev, acc, w):
        if r == ens.R:
            d = det([[ens.p(r - 1, r, a, b) for b in ens.x_right] for a in prev])
            if d != 0:
                out.append((w * d, tuple(acc)))
            return
        for xs in itertools.combinations(sorted(ens.window, reverse=True), M):
            d = det([[ens.p(r - 1, r, a, b) for b in xs] for a in prev])
            if d != 0:
                rec(r + 1, xs, acc + [xs], w * d)

    rec(ens.L + 1, tuple(ens.x_left), [], 1)
    return out
