import itertools

import numpy as np
import pytest

from dimerdpp.kasteleyn import build_aztec, domino_type, enumerate_matchings, matching_weight
from dimerdpp.lgv import general_kernel
from dimerdpp.models.aztec import (
    AztecEnsembleSpec,
    aztec_ensemble,
    aztec_ground_set,
    aztec_kernel,
    aztec_particle_map,
    aztec_tiling_from_particles,
    enumerate_particle_law,
    kenyon_particle_correlation,
)
from dimerdpp.sampler import sample


def frequency(law, pts):
    return sum(float(p) for p, s in law if set(pts) <= s)


def test_spec_validation():
    with pytest.raises(ValueError):
        AztecEnsembleSpec(0, 1.0)
    with pytest.raises(ValueError):
        AztecEnsembleSpec(2, -1.0)


def test_two_contour_forms_agree():
    spec = AztecEnsembleSpec(4, 0.5)
    K1, K2 = aztec_kernel(spec, form=1), aztec_kernel(spec, form=2)
    pts = aztec_ground_set(4)[::5][:5]
    assert max(abs(K1(x, y) - K2(x, y)) for x in pts for y in pts) < 1e-10


def test_kernel_matches_uniform_n2_tilings():
    spec = AztecEnsembleSpec(2, 1.0)
    K = aztec_kernel(spec)
    law = enumerate_particle_law(spec)
    assert len(law) == 8
    for k in (1, 2, 3):
        for pts in itertools.combinations(aztec_ground_set(2), k):
            assert abs(K.correlation(pts) - frequency(law, pts)) < 1e-10


def test_kernel_matches_path_route():
    spec = AztecEnsembleSpec(2, 1.0)
    Kc, Kg = aztec_kernel(spec), general_kernel(aztec_ensemble(spec))
    pts = aztec_ground_set(2)
    assert max(abs(Kc(x, y) - Kg(x, y)) for x in pts for y in pts) < 1e-10


def test_kenyon_route_matches_enumeration():
    spec = AztecEnsembleSpec(2, 0.5)
    _, K = build_aztec(2, 0.5)
    law = enumerate_particle_law(spec)
    for pts in itertools.combinations(aztec_ground_set(2), 2):
        assert abs(kenyon_particle_correlation(K, pts) - frequency(law, pts)) < 1e-10


def test_radius_choice_inside_annulus():
    spec = AztecEnsembleSpec(2, 0.5)
    pts = aztec_ground_set(2)
    A = aztec_kernel(spec, radii=(0.7, 1.5)).matrix(pts)
    B = aztec_kernel(spec, radii=(0.55, 1.9)).matrix(pts)
    assert np.max(np.abs(A - B)) < 1e-10
    with pytest.raises(ValueError):
        aztec_kernel(spec, radii=(0.3, 1.5))


def test_unweighted_n1_tiling_gives_lowest_paths():
    a = 0.5
    g, _ = build_aztec(1, a)
    law = dict((s, p) for p, s in enumerate_particle_law(AztecEnsembleSpec(1, a)))
    flat = next(c for c in enumerate_matchings(g) if matching_weight(g, c) == 1)
    particles = aztec_particle_map(g, flat)
    assert law[particles] == pytest.approx(1 / (1 + a * a))
    assert particles == frozenset({(1, 0)})


def test_particle_map_round_trip_n3():
    g, _ = build_aztec(3, 1)
    configs = enumerate_matchings(g)
    assert len(configs) == 64
    images = {aztec_particle_map(g, c) for c in configs}
    assert len(images) == 64
    assert all(aztec_tiling_from_particles(g, aztec_particle_map(g, c)) == c for c in configs)


def test_particles_per_line_plus_frozen_paths():
    n = 3
    g, _ = build_aztec(n, 1)
    for c in enumerate_matchings(g):
        pts = aztec_particle_map(g, c)
        for r in range(1, 2 * n):
            # r // 2 paths are frozen below the ground set on line r
            assert sum(1 for line, _ in pts if line == r) + r // 2 == n


def test_arctic_circle_frozen_regions():
    n = 64
    g, K = build_aztec(n, 1)
    config = sample(g, K, seed=2024)
    mids, north = [], []
    for e in sorted(config.edges):
        b, w, _ = g.edges[e]
        x1, x2 = (np.array(g.black[b]) + np.array(g.white[w])) / 2
        mids.append(((x1 + x2) / 2, (x2 - x1) / 2))  # screen coordinates
        north.append(domino_type(g, e) == 3)
    mids, north = np.array(mids), np.array(north, float)
    # the diamond |X - n| + |Y| <= n has inscribed circle of radius n / sqrt(2) about (n, 0)
    dist = np.hypot(mids[:, 0] - n, mids[:, 1]) - n / np.sqrt(2)
    near = np.hypot(mids[:, None, 0] - mids[None, :, 0], mids[:, None, 1] - mids[None, :, 1]) <= 3.0
    local = (near @ north) / near.sum(axis=1)
    outside = dist > 0.1 * n
    inside = dist < -0.1 * n
    assert outside.sum() > 100 and inside.sum() > 100
    assert np.all((local[outside] <= 0.02) | (local[outside] >= 0.98))
    assert 0.02 < north[inside].mean() < 0.98
    # every frozen corner shows up, one domino type each
    assert 0 < north[outside].mean() < 1
