"""Exact dimer sampling by sequential conditioning on edge probabilities.

White vertices are visited in a fixed Hilbert-curve order.  At each visit the
white vertex is matched to one of its free black neighbours b with probability
K(b, w) K_c^{-1}(w, b), where K_c is the Kasteleyn matrix with every matched
pair removed.  K_c^{-1} is never formed: rows of the inverse of a factorized
base matrix are combined with a small Schur complement over the pairs matched
since the last factorization, which is refreshed every 64 steps.

Kasteleyn matrices of large graphs with frozen regions are badly conditioned
(the Aztec diamond of size 64 reaches 1e16), although edge probabilities are
not.  Rows and columns are therefore rescaled first so that the inverse has
rows and columns of comparable size; positive diagonal rescaling multiplies
every matching by the same constant and leaves the measure unchanged.

Sample j of a run with seed s uses the uniforms of Philox(s) starting at draw
j * stride, so samples do not depend on how a run is split across workers.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .dpp import FiniteKernel
from .kasteleyn import DimerConfiguration, KasteleynMatrix, height_function
from .quadrature import NonConvergenceError

__all__ = [
    "MASS_TOLERANCE",
    "balanced_matrix",
    "hilbert_index",
    "white_order",
    "SamplerState",
    "sample",
    "sample_many",
    "empirical_vs_kernel",
    "CorrelationReport",
    "sample_record",
    "write_jsonl",
    "read_jsonl",
    "worker_count",
]

MASS_TOLERANCE = 1e-6
REFACTOR_EVERY = 64
WORKERS_ENV = "DIMERDPP_WORKERS"


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    if not raw:
        return default
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return k


def hilbert_index(x: int, y: int, order: int) -> int:
    """Position of (x, y) on the Hilbert curve filling [0, 2^order)^2."""
    d = 0
    s = 1 << (order - 1)
    while s > 0:
        rx = 1 if x & s else 0
        ry = 1 if y & s else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x, y = s - 1 - x, s - 1 - y
            x, y = y, x
        s >>= 1
    return d


def white_order(graph) -> list[int]:
    """White vertices sorted along a Hilbert curve through their coordinates."""
    xs = sorted({p[0] for p in graph.white})
    ys = sorted({p[1] for p in graph.white})
    rx = {v: i for i, v in enumerate(xs)}
    ry = {v: i for i, v in enumerate(ys)}
    order = max(1, math.ceil(math.log2(max(len(xs), len(ys), 2))))
    keys = [hilbert_index(rx[p[0]], ry[p[1]], order) for p in graph.white]
    return sorted(range(len(graph.white)), key=lambda i: keys[i])


def _stride(n_white: int) -> int:
    # Philox advances in blocks of four doubles
    return 4 * max(1, math.ceil(n_white / 4))


def _uniforms(seed: int, start: int, count: int, n_white: int) -> np.ndarray:
    stride = _stride(n_white)
    bg = np.random.Philox(seed)
    if start:
        bg.advance(start * stride // 4)
    return np.random.Generator(bg).random((count, stride))[:, :n_white]


def balanced_matrix(K: KasteleynMatrix, spread: float = 2.5, probes: int = 8, max_rounds: int = 30):
    """(D_r K D_c in CSC form, its entry on each edge).

    The diagonals are found by a few rounds of Sinkhorn balancing of the
    inverse, with row and column norms estimated from solves against fixed
    random probes; balancing stops once the log-norms span at most ``spread``.
    """
    cached = getattr(K, "_balanced", None)
    if cached is not None:
        return cached
    A = K.sparse.tocsr()
    nb, nw = A.shape
    rng = np.random.default_rng(0)
    lr, lc = np.zeros(nb), np.zeros(nw)
    B = A
    for _ in range(max_rounds):
        B = sparse.diags(np.exp(lr)) @ A @ sparse.diags(np.exp(lc))
        try:
            lu = spla.splu(B.tocsc())
        except RuntimeError as exc:
            raise NonConvergenceError("Kasteleyn matrix is singular") from exc
        rows_w = 0.5 * np.log(np.mean(np.abs(lu.solve(rng.normal(size=(nb, probes)))) ** 2, axis=1))
        cols_b = 0.5 * np.log(np.mean(np.abs(lu.solve(rng.normal(size=(nw, probes)), trans="T")) ** 2, axis=1))
        if max(np.ptp(rows_w), np.ptp(cols_b)) <= spread:
            break
        lc += 0.5 * rows_w
        lr += 0.5 * cols_b
    g = K.graph
    entries = np.array([K.entry(e) * math.exp(lr[b] + lc[w]) for e, (b, w, _) in enumerate(g.edges)])
    K._balanced = (B.tocsc(), entries)
    return K._balanced


def _pick(u: float, p: np.ndarray) -> int:
    c = np.cumsum(p)
    return min(int(np.searchsorted(c, u * c[-1], side="right")), len(p) - 1)


class SamplerState:
    """One sample in progress.

    ``conditional`` gives the free edges at the next white vertex with their
    conditional probabilities; ``advance`` draws one of them.
    """

    def __init__(self, K: KasteleynMatrix, uniforms: np.ndarray, order: Sequence[int] | None = None,
                 refactor_every: int = REFACTOR_EVERY):
        self.K = K
        self.graph = K.graph
        self.order = list(white_order(self.graph) if order is None else order)
        nb, nw = K.sparse.shape
        if nb != nw:
            raise ValueError("the graph has no perfect matching (colour classes differ in size)")
        if len(uniforms) < nw:
            raise ValueError("need one uniform per white vertex")
        self.uniforms = uniforms
        self.refactor_every = refactor_every
        self.step = 0
        self.edges: list[int] = []
        self.used = np.zeros(nb, bool)
        self.refactorizations = 0
        self.max_mass_error = 0.0
        self._csc, self._entries = balanced_matrix(K)
        self._refactor()

    @property
    def done(self) -> bool:
        return self.step == len(self.order)

    def _refactor(self) -> None:
        cols = self.order[self.step:]
        rows = np.flatnonzero(~self.used)
        self._rows = rows
        self._col_pos = {w: j for j, w in enumerate(cols)}
        self._base = None
        if len(cols):
            sub = self._csc[rows][:, cols].tocsc()
            try:
                self._base = spla.splu(sub)
            except RuntimeError as exc:
                raise NonConvergenceError(f"conditioned Kasteleyn matrix is singular at step {self.step}") from exc
        self._cond_rows: list[np.ndarray] = []  # base inverse rows of whites matched since the refactorization
        self._cond_blacks: list[int] = []
        self.refactorizations += 1

    def _base_row(self, w: int) -> np.ndarray:
        """Row w of the base inverse, indexed by original black labels."""
        rhs = np.zeros(len(self._rows), complex)
        rhs[self._col_pos[w]] = 1.0
        y = self._base.solve(rhs, trans="T")
        out = np.zeros(len(self.used), complex)
        out[self._rows] = y
        return out

    def conditional(self) -> tuple[list[int], np.ndarray, float]:
        """(free edges at the next white vertex, probabilities, |total mass - 1|)."""
        w = self.order[self.step]
        cand = [e for e in self.graph.adj_white[w] if not self.used[self.graph.edges[e][0]]]
        if not cand:
            raise NonConvergenceError(f"white vertex {self.graph.white[w]} has no free neighbour")
        bs = [self.graph.edges[e][0] for e in cand]
        r = self._base_row(w)
        inv = r[bs]
        if self._cond_blacks:
            R = np.array(self._cond_rows)
            S = R[:, self._cond_blacks]
            inv = inv - r[self._cond_blacks] @ np.linalg.solve(S, R[:, bs])
        p = self._entries[cand] * inv
        self._last_row = r
        return cand, p, abs(complex(p.sum()) - 1)

    def advance(self) -> int:
        cand, p, err = self.conditional()
        if err > MASS_TOLERANCE or np.any(p.real < -MASS_TOLERANCE):
            self._refactor()
            cand, p, err = self.conditional()
            if err > MASS_TOLERANCE or np.any(p.real < -MASS_TOLERANCE):
                raise NonConvergenceError(
                    f"conditional mass {complex(p.sum())} at step {self.step} after refactorization"
                )
        self.max_mass_error = max(self.max_mass_error, err)
        pr = np.clip(p.real, 0.0, None)
        e = cand[_pick(float(self.uniforms[self.step]), pr)]
        b = self.graph.edges[e][0]
        self.edges.append(e)
        self.used[b] = True
        self._cond_rows.append(self._last_row)
        self._cond_blacks.append(b)
        self.step += 1
        if len(self._cond_blacks) >= self.refactor_every and not self.done:
            self._refactor()
        return e

    def run(self) -> DimerConfiguration:
        while not self.done:
            self.advance()
        return DimerConfiguration.from_edges(self.edges)


def sample(graph, K: KasteleynMatrix, seed: int) -> DimerConfiguration:
    """One exact sample of the dimer measure of (graph, K)."""
    if K.graph is not graph:
        raise ValueError("K was built for a different graph")
    return SamplerState(K, _uniforms(seed, 0, 1, len(graph.white))[0]).run()


# ---------------------------------------------------------------- many samples


class _StateTable:
    """Conditional probabilities for the lockstep sampler, keyed by step and by
    which black vertices around the unvisited region are taken."""

    def __init__(self, K: KasteleynMatrix, order: Sequence[int]):
        self.K = K
        self.g = K.graph
        self.order = list(order)
        self.csc, self.entries = balanced_matrix(K)
        nb = len(self.g.black)
        self.frontier = []
        for t in range(len(self.order)):
            near = set()
            for w in self.order[t:]:
                near.update(self.g.edges[e][0] for e in self.g.adj_white[w])
            self.frontier.append(np.array(sorted(near), int))
        self.cache: dict = {}
        self.nb = nb
        self.max_mass_error = 0.0

    def probabilities(self, t: int, used: np.ndarray):
        w = self.order[t]
        cand = [e for e in self.g.adj_white[w] if not used[self.g.edges[e][0]]]
        if not cand:
            raise NonConvergenceError(f"white vertex {self.g.white[w]} has no free neighbour")
        rows = np.flatnonzero(~used)
        cols = self.order[t:]
        sub = self.csc[rows][:, cols]
        rhs = np.zeros(len(cols), complex)
        rhs[0] = 1.0
        if len(cols) <= 400:
            y = np.linalg.solve(sub.toarray().T, rhs)
        else:
            y = spla.splu(sub.tocsc()).solve(rhs, trans="T")
        pos = {b: i for i, b in enumerate(rows)}
        p = self.entries[cand] * y[[pos[self.g.edges[e][0]] for e in cand]]
        err = abs(complex(p.sum()) - 1)
        if err > MASS_TOLERANCE or np.any(p.real < -MASS_TOLERANCE):
            raise NonConvergenceError(f"conditional mass {complex(p.sum())} at step {t}")
        self.max_mass_error = max(self.max_mass_error, err)
        return cand, np.clip(p.real, 0.0, None)

    def run(self, U: np.ndarray) -> np.ndarray:
        """Edge chosen at each step for each row of uniforms."""
        m, steps = U.shape
        used = np.zeros((m, self.nb), bool)
        out = np.empty((m, steps), np.int64)
        black_of = np.array([b for b, _, _ in self.g.edges])
        for t in range(steps):
            F = self.frontier[t]
            packed = np.packbits(used[:, F], axis=1)
            keys = np.ascontiguousarray(packed).view(np.dtype((np.void, packed.shape[1]))).ravel()
            uniq, first, inv = np.unique(keys, return_index=True, return_inverse=True)
            cum = np.ones((len(uniq), 4))
            edge = np.zeros((len(uniq), 4), np.int64)
            deg = np.zeros(len(uniq), np.int64)
            for j, key in enumerate(uniq):
                ck = (t, key.tobytes())
                if ck not in self.cache:
                    self.cache[ck] = self.probabilities(t, used[first[j]])
                cand, p = self.cache[ck]
                k = len(cand)
                c = np.cumsum(p)
                cum[j, :k] = c / c[-1]
                edge[j, :k] = cand
                deg[j] = k
            inv = inv.ravel()
            idx = np.sum(U[:, t, None] >= cum[inv], axis=1)
            idx = np.minimum(idx, deg[inv] - 1)
            e = edge[inv, idx]
            out[:, t] = e
            used[np.arange(m), black_of[e]] = True
        return out


def _batch_worker(args):
    K, order, seed, start, count, chunk = args
    table = _StateTable(K, order)
    nw = len(order)
    res = []
    for s in range(start, start + count, chunk):
        c = min(chunk, start + count - s)
        res.append(table.run(_uniforms(seed, s, c, nw)))
    return np.concatenate(res) if res else np.empty((0, nw), np.int64)


def _sequential_worker(args):
    K, order, seed, start, count = args
    nw = len(order)
    out = np.empty((count, nw), np.int64)
    for j in range(count):
        st = SamplerState(K, _uniforms(seed, start + j, 1, nw)[0], order)
        st.run()
        out[j] = st.edges
    return out


def sample_many(
    graph, K: KasteleynMatrix, count: int, seed: int, engine: str = "auto", workers: int | None = None,
    chunk: int = 20000, as_edges: bool = False,
):
    """``count`` independent samples; sample j is the one ``sample`` would draw
    from the j-th block of the seed's stream (``sample_many(..., 1, s)[0]`` is
    ``sample(..., s)``).

    engine: "sequential" runs a SamplerState per sample; "batch" advances all
    samples in lockstep and computes each distinct conditional law once (fast
    for small graphs with many samples); "auto" picks "batch" for graphs with
    at most 300 white vertices.  ``workers`` (default from DIMERDPP_WORKERS)
    splits the samples into contiguous blocks.  With ``as_edges`` the result
    is a (count, #white) array of chosen edge indices.
    """
    if K.graph is not graph:
        raise ValueError("K was built for a different graph")
    if count < 0:
        raise ValueError("count must be non-negative")
    nw = len(graph.white)
    order = white_order(graph)
    if engine == "auto":
        engine = "batch" if nw <= 300 else "sequential"
    if engine not in ("batch", "sequential"):
        raise ValueError(f"unknown engine {engine!r}")
    workers = worker_count() if workers is None else workers
    blocks = [(s, min(count, s + math.ceil(count / workers)) - s) for s in range(0, count, max(1, math.ceil(count / workers)))]
    if engine == "batch":
        jobs = [(K, order, seed, s, c, chunk) for s, c in blocks]
        fn = _batch_worker
    else:
        jobs = [(K, order, seed, s, c) for s, c in blocks]
        fn = _sequential_worker
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(fn, jobs))
    else:
        parts = [fn(j) for j in jobs]
    edges = np.concatenate(parts) if parts else np.empty((0, nw), np.int64)
    if as_edges:
        return edges
    return [DimerConfiguration.from_edges(row) for row in edges]


# ---------------------------------------------------------------- statistics


@dataclass
class CorrelationReport:
    count: int
    rows: list = field(default_factory=list)  # dicts: points, empirical, predicted, stderr, z, flagged
    threshold: float = 4.0

    @property
    def flagged(self) -> list:
        return [r for r in self.rows if r["flagged"]]

    @property
    def max_z(self) -> float:
        zs = [abs(r["z"]) for r in self.rows if math.isfinite(r["z"])]
        return max(zs, default=0.0)

    def to_dict(self) -> dict:
        return {"count": self.count, "threshold": self.threshold, "rows": self.rows}


def _as_point_set(s) -> frozenset:
    return s.edges if isinstance(s, DimerConfiguration) else frozenset(s)


def empirical_vs_kernel(samples, kernel: FiniteKernel, point_sets: Iterable, threshold: float = 4.0) -> CorrelationReport:
    """Empirical frequency of each point set against det K restricted to it.

    The standard error uses the predicted probability q, sqrt(q (1 - q) / N).
    A row is flagged when |empirical - q| exceeds ``threshold`` standard
    errors (or, for q in {0, 1}, when any sample disagrees).
    """
    sets = [_as_point_set(s) for s in samples]
    N = len(sets)
    rep = CorrelationReport(N, threshold=threshold)
    if N == 0:
        return rep
    for A in point_sets:
        A = list(A)
        kernel.index(A)  # validates membership
        q = float(np.real(np.linalg.det(kernel.submatrix(A)))) if A else 1.0
        hits = sum(1 for s in sets if all(x in s for x in A))
        emp = hits / N
        se = math.sqrt(max(q * (1 - q), 0.0) / N)
        if se > 0:
            z = (emp - q) / se
            flagged = abs(z) > threshold
        else:
            z = 0.0 if abs(emp - q) < 1e-12 else math.inf
            flagged = not math.isfinite(z) or abs(emp - q) > 1e-12
        rep.rows.append(
            {"points": A, "empirical": emp, "predicted": q, "stderr": se, "z": z, "flagged": bool(flagged)}
        )
    return rep


# ---------------------------------------------------------------- archives


def sample_record(graph, config: DimerConfiguration, seed: int, index: int, run_config: dict) -> dict:
    """JSON-ready summary of one sample: seed, run configuration, edges and height statistics."""
    h = height_function(graph, config).values
    vals = np.array(list(h.values()), float)
    return {
        "seed": seed,
        "index": index,
        "config": run_config,
        "edges": sorted(int(e) for e in config.edges),
        "height": {
            "faces": len(vals),
            "min": int(vals.min()),
            "max": int(vals.max()),
            "mean": float(vals.mean()),
            "std": float(vals.std()),
        },
    }


def write_jsonl(path, records: Iterable[dict]) -> int:
    k = 0
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
            k += 1
    return k


def read_jsonl(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
