import itertools
from fractions import Fraction

import numpy as np
import pytest

from dimerdpp.kasteleyn import (
    DOMINO_COLORS,
    DimerConfiguration,
    KasteleynMatrix,
    WeightedBipartitePlanarGraph,
    aztec_faces,
    build_aztec,
    build_two_periodic_aztec,
    check_cycle_sign,
    check_face_signs,
    cycle_sign_product,
    dimer_correlation_kernel,
    edge_probabilities,
    enclosing_cycles,
    enumerate_matchings,
    exact_partition_function,
    face_sign_products,
    graph_from_json,
    graph_to_json,
    height_function,
    matching_weight,
    partition_function,
    tiling_svg,
    tp_class,
)
from dimerdpp.dpp import correlation


def brute_force_Z(g):
    return sum(matching_weight(g, c) for c in enumerate_matchings(g))


def test_aztec_n1_structure():
    g, K = build_aztec(1, 1)
    assert len(g.black) + len(g.white) == 4 and len(g.edges) == 4
    faces = face_sign_products(K)
    assert len(faces) == 1
    face, prod, expected = faces[0]
    assert len(face) == 4 and expected == -1 and abs(prod - (-1)) < 1e-12


@pytest.mark.parametrize("n,expected", [(2, 8), (3, 64)])
def test_aztec_determinant_counts(n, expected):
    _, K = build_aztec(n, 1)
    assert abs(abs(np.linalg.det(K.sparse.toarray())) - expected) < 1e-9
    assert partition_function(K) == pytest.approx(expected, rel=1e-12)


def test_exact_counts_up_to_eight():
    for n in range(1, 9):
        assert exact_partition_function(build_aztec(n, 1)[1]) == 2 ** (n * (n + 1) // 2)


def test_weighted_partition_function_matches_enumeration():
    a = Fraction(3, 7)
    g, K = build_aztec(2, a)
    assert exact_partition_function(K) == brute_force_Z(g)
    assert partition_function(K) == pytest.approx(float(brute_force_Z(g)), rel=1e-12)


def test_single_edge_graph():
    g = WeightedBipartitePlanarGraph([(0, 0)], [(1, 0)], [(0, 0, Fraction(5, 2))])
    K = KasteleynMatrix(g, [0])
    assert partition_function(K) == pytest.approx(2.5)


def test_determinant_equals_brute_force_on_random_weights():
    rng = np.random.default_rng(1)
    for _ in range(100):
        g, K = build_aztec(2, 1)
        edges = [(b, w, Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5)))) for b, w, _ in g.edges]
        g2 = WeightedBipartitePlanarGraph(g.black, g.white, edges, name=g.name, params=g.params)
        K2 = KasteleynMatrix(g2, K.sign_powers)
        assert abs(exact_partition_function(K2)) == brute_force_Z(g2)


def test_two_periodic_uniform_specialisation():
    g, K = build_two_periodic_aztec(1, a=1)
    assert exact_partition_function(K) == 2 ** (4 * 5 // 2)


def test_two_periodic_matches_enumeration():
    g, K = build_two_periodic_aztec(1, a=Fraction(1, 2))
    configs = enumerate_matchings(g)
    assert len(configs) == 1024
    assert exact_partition_function(K) == sum(matching_weight(g, c) for c in configs)


def test_two_periodic_vertex_classes_split_evenly():
    g, _ = build_two_periodic_aztec(2)
    for verts in (g.black, g.white):
        classes = [tp_class(v) for v in verts]
        assert len(set(classes)) == 2
        assert classes.count(classes[0]) * 2 == len(verts)


def test_edge_probabilities_n1():
    g, K = build_aztec(1, 1)
    for e in range(4):
        assert edge_probabilities(K, [e]) == pytest.approx(0.5, abs=1e-14)
    a = 0.6
    g, K = build_aztec(1, a)
    heavy = [e for e, (_, _, w) in enumerate(g.edges) if w != 1]
    assert edge_probabilities(K, [heavy[0]]) == pytest.approx(a * a / (1 + a * a), abs=1e-14)


def test_probabilities_at_each_white_vertex_sum_to_one():
    g, K = build_aztec(4, Fraction(1, 3))
    for w in range(len(g.white)):
        probs = [edge_probabilities(K, [e]) for e in g.adj_white[w]]
        assert all(0 <= p <= 1 for p in probs)
        assert abs(sum(probs) - 1) < 1e-9


def test_correlation_kernel_matches_tilings():
    g, K = build_aztec(2, 1)
    L = dimer_correlation_kernel(K)
    configs = enumerate_matchings(g)
    for e in range(len(g.edges)):
        assert abs(L.matrix[e, e] - edge_probabilities(K, [e])) < 1e-12
    for pair in itertools.combinations(range(len(g.edges)), 2):
        freq = sum(1 for c in configs if set(pair) <= c.edges) / len(configs)
        assert abs(correlation(L, pair) - freq) < 1e-10


def test_gas_phase_correlations_factorise_at_distance():
    g, K = build_two_periodic_aztec(n=16, a=0.5)
    centre = g.white_index[(15, 16)]
    near = g.adj_white[centre][0]
    gaps = []
    for shift in (2, 6):
        far = g.adj_white[g.white_index[(15 + shift, 16)]][0]
        L = dimer_correlation_kernel(K, [near, far])
        gaps.append(abs(correlation(L, [near, far]) - L.matrix[0, 0] * L.matrix[1, 1]))
    assert gaps[1] < gaps[0] * 0.2


def test_face_and_cycle_signs():
    for n in range(1, 5):
        _, K = build_aztec(n, Fraction(2, 3))
        assert check_face_signs(K)
    g, K = build_aztec(3, 1)
    cycles = enclosing_cycles(g)
    assert {cycle_sign_product(K, c)[2] for c in cycles} == {0, 1}
    assert all(check_cycle_sign(K, c) for c in cycles)


def test_height_of_n1_tilings():
    g, _ = build_aztec(1, 1)
    heights = {}
    for c in enumerate_matchings(g):
        heights[frozenset(c.edges)] = height_function(g, c).values
    # edges 0 and 3 use no weighted pair; their heights follow the +-1 / +-3 rules by hand
    assert heights[frozenset({0, 3})] == {(0, 0): 0, (1, 1): -1, (2, 2): 0, (2, 0): 2, (0, 2): 2}
    first, second = heights.values()
    assert {f for f in first if first[f] != second[f]} == {(1, 1)}


def test_height_rules_consistent_on_n3():
    g, _ = build_aztec(3, 1)
    faces = set(aztec_faces(3))
    outer = sorted(f for f in faces if min(f) == 0 or max(f) == 6)
    boundary = None
    for c in enumerate_matchings(g):
        h = height_function(g, c).values
        for f in faces:
            for d in ((1, 1), (1, -1)):
                nb = (f[0] + d[0], f[1] + d[1])
                if nb in faces:
                    assert h[nb] - h[f] in (1, -1, 3, -3)
        vals = [h[f] for f in outer]
        boundary = boundary or vals
        assert vals == boundary


def test_height_rejects_imperfect_matching():
    g, _ = build_aztec(2, 1)
    with pytest.raises(ValueError):
        height_function(g, DimerConfiguration.from_edges([0]))


def test_json_round_trip():
    g, K = build_aztec(2, Fraction(1, 2))
    g2, K2 = graph_from_json(graph_to_json(g, K))
    assert g2.edges == g.edges and list(K2.sign_powers) == list(K.sign_powers)
    assert exact_partition_function(K2) == exact_partition_function(K)


def test_tiling_svg_uses_four_colours():
    g, K = build_aztec(4, 1)
    from dimerdpp.sampler import sample

    svg = tiling_svg(g, sample(g, K, 3), comment="seed=3")
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    used = {c for c in DOMINO_COLORS if c in svg}
    assert used <= set(DOMINO_COLORS) and len(used) >= 2
    assert "seed=3" in svg
