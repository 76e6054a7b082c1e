import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from dimerdpp.kasteleyn import (
    build_aztec,
    build_two_periodic_aztec,
    dimer_correlation_kernel,
    enumerate_matchings,
    matching_weight,
)
from dimerdpp.sampler import (
    SamplerState,
    balanced_matrix,
    empirical_vs_kernel,
    hilbert_index,
    read_jsonl,
    sample,
    sample_many,
    sample_record,
    white_order,
    write_jsonl,
)


def exact_law(g):
    configs = enumerate_matchings(g)
    w = np.array([float(matching_weight(g, c)) for c in configs])
    return [c.edges for c in configs], w / w.sum()


def test_n1_frequencies_within_three_sigma():
    g, K = build_aztec(1, 1)
    N = 20000
    counts = Counter(frozenset(r.tolist()) for r in sample_many(g, K, N, seed=3, as_edges=True))
    configs, p = exact_law(g)
    assert set(counts) <= set(configs)
    for c, q in zip(configs, p):
        assert abs(counts[c] / N - q) < 3 * math.sqrt(q * (1 - q) / N)


@pytest.mark.parametrize("a", [1, Fraction(1, 2)])
def test_n2_chi_square(a):
    g, K = build_aztec(2, a)
    N = 40000
    counts = Counter(frozenset(r.tolist()) for r in sample_many(g, K, N, seed=9, as_edges=True))
    configs, p = exact_law(g)
    chi2 = sum((counts[c] - N * q) ** 2 / (N * q) for c, q in zip(configs, p))
    dof = len(configs) - 1
    # 5 sigma above the chi-square mean
    assert chi2 < dof + 5 * math.sqrt(2 * dof)


def test_edge_pairs_against_kernel_n8():
    g, K = build_aztec(8, 1)
    draws = sample_many(g, K, 20000, seed=21)
    L = dimer_correlation_kernel(K)
    rng = np.random.default_rng(4)
    edges = rng.choice(len(g.edges), size=24, replace=False).tolist()
    sets = [[e] for e in edges] + [list(p) for p in itertools.combinations(edges[:10], 2)]
    rep = empirical_vs_kernel(draws, L, sets)
    assert len(rep.rows) == len(sets)
    assert not rep.flagged, rep.flagged


def _white_neighbours(g, radius):
    centre = np.mean(np.array(g.white, float), axis=0)
    near = [i for i, w in enumerate(g.white) if np.max(np.abs(np.array(w) - centre)) <= radius]
    pos = {g.white[i]: i for i in near}
    pairs = []
    for i in near:
        x, y = g.white[i]
        for d in ((2, 0), (0, 2)):
            j = pos.get((x + d[0], y + d[1]))
            if j is not None:
                pairs.append((i, j))
    return pairs


def test_two_periodic_nearest_neighbour_pairs():
    g, K = build_two_periodic_aztec(n=8, a=0.5)
    draws = sample_many(g, K, 20000, seed=17)
    L = dimer_correlation_kernel(K)
    sets = []
    for i, j in _white_neighbours(g, 3):
        for e in g.adj_white[i]:
            for f in g.adj_white[j]:
                if g.edges[e][0] != g.edges[f][0]:
                    sets.append([e, f])
    rep = empirical_vs_kernel(draws, L, sets)
    assert len(sets) > 20
    assert not rep.flagged, rep.flagged


def test_two_periodic_n16_centre_edges():
    g, K = build_two_periodic_aztec(n=16, a=0.5)
    draws = sample_many(g, K, 600, seed=2, engine="sequential")
    L = dimer_correlation_kernel(K)
    sets = [[e] for i, _ in _white_neighbours(g, 2) for e in g.adj_white[i]]
    assert not empirical_vs_kernel(draws, L, sets).flagged


def test_empty_sample_list_gives_empty_report():
    g, K = build_aztec(1, 1)
    rep = empirical_vs_kernel([], dimer_correlation_kernel(K), [[0]])
    assert rep.count == 0 and rep.rows == [] and rep.max_z == 0.0


def test_deterministic_and_split_independent():
    g, K = build_aztec(4, Fraction(1, 2))
    a = sample_many(g, K, 30, seed=5, engine="batch", as_edges=True)
    b = sample_many(g, K, 30, seed=5, engine="sequential", as_edges=True)
    c = sample_many(g, K, 30, seed=5, engine="sequential", workers=3, as_edges=True)
    assert np.array_equal(a, b) and np.array_equal(a, c)
    assert sample(g, K, 5).edges == frozenset(a[0].tolist())
    assert not np.array_equal(a, sample_many(g, K, 30, seed=6, as_edges=True))


def test_samples_are_perfect_matchings():
    g, K = build_aztec(6, 1)
    for config in sample_many(g, K, 5, seed=1):
        blacks = [g.edges[e][0] for e in config.edges]
        whites = [g.edges[e][1] for e in config.edges]
        assert len(set(blacks)) == len(g.black) and len(set(whites)) == len(g.white)


def test_conditional_laws_are_probabilities():
    g, K = build_aztec(5, Fraction(1, 3))
    st = SamplerState(K, np.random.default_rng(0).random(len(g.white)), refactor_every=7)
    while not st.done:
        cand, p, err = st.conditional()
        assert err < 1e-9
        assert np.all(p.real > -1e-12) and np.all(p.real < 1 + 1e-12)
        assert np.max(np.abs(p.imag)) < 1e-9
        st.advance()
    assert st.refactorizations > 1


def test_balancing_preserves_edge_probabilities():
    g, K = build_aztec(6, Fraction(1, 2))
    B, entries = balanced_matrix(K)
    inv = np.linalg.inv(B.toarray())
    direct = np.real(np.diag(dimer_correlation_kernel(K).matrix))
    balanced = np.array([entries[e] * inv[w, b] for e, (b, w, _) in enumerate(g.edges)]).real
    assert np.max(np.abs(balanced - direct)) < 1e-12


def test_large_diamond_samples_stably():
    g, K = build_aztec(48, 1)
    st = SamplerState(K, np.random.default_rng(1).random(len(g.white)))
    config = st.run()
    assert len(config.edges) == len(g.white)
    assert st.max_mass_error < 1e-8


def test_hilbert_order_visits_every_white_once():
    g, _ = build_aztec(5, 1)
    order = white_order(g)
    assert sorted(order) == list(range(len(g.white)))
    assert sorted(hilbert_index(x, y, 2) for x in range(4) for y in range(4)) == list(range(16))


def test_sample_many_validates_arguments():
    g, K = build_aztec(1, 1)
    with pytest.raises(ValueError):
        sample_many(g, K, -1, seed=0)
    with pytest.raises(ValueError):
        sample_many(g, K, 1, seed=0, engine="gibbs")
    g2, _ = build_aztec(2, 1)
    with pytest.raises(ValueError):
        sample(g2, K, 0)


def test_jsonl_round_trip(tmp_path):
    g, K = build_aztec(3, 1)
    configs = sample_many(g, K, 3, seed=8)
    recs = [sample_record(g, c, 8, i, {"n": 3}) for i, c in enumerate(configs)]
    path = tmp_path / "s.jsonl"
    assert write_jsonl(path, recs) == 3
    back = read_jsonl(path)
    assert back == recs
    assert back[0]["height"]["faces"] > 0
