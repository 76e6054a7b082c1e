import itertools
import math

import numpy as np
import pytest

from dimerdpp.models.interlacing import (
    GTPattern,
    enumerate_gt_patterns,
    interlacing_ground_set,
    interlacing_kernel,
)


def pattern_count(x):
    n = len(x)
    num = math.prod(x[i] - x[j] for i, j in itertools.combinations(range(n), 2))
    den = math.prod(j - i for i, j in itertools.combinations(range(n), 2))
    return num // den


@pytest.mark.parametrize("top", [(0,), (2, 0), (4, 2, 0), (3, 1, 0), (5, 3, 1, 0)])
def test_pattern_count_is_product_formula(top):
    pats = enumerate_gt_patterns(top)
    assert len(pats) == pattern_count(top)
    assert len(set(pats)) == len(pats)
    for p in pats:
        assert p.rows[-1] == top
        for lo, hi in zip(p.rows, p.rows[1:]):
            assert all(hi[i] >= lo[i] >= hi[i + 1] for i in range(len(lo)))


def test_single_particle():
    K = interlacing_kernel((5,))
    assert abs(K.correlation([(1, 5)]) - 1) < 1e-12


def check_against_patterns(top, route, orders, padded=False, tol=1e-10):
    pats = [p.particles() for p in enumerate_gt_patterns(top)]
    K = interlacing_kernel(top, route)
    sites = interlacing_ground_set(top, padded=padded)
    worst = 0.0
    for k in orders:
        for pts in itertools.combinations(sites, k):
            freq = sum(1 for p in pats if set(pts) <= p) / len(pats)
            worst = max(worst, abs(complex(K.correlation(pts)) - freq))
    assert worst < tol


def test_contour_route_matches_uniform_patterns():
    check_against_patterns((4, 2, 0), "contour", (1, 2))


@pytest.mark.parametrize("top", [(2, 0), (4, 2, 0), (5, 3, 1, 0), (4, 3, 1, -1)])
def test_residue_route_matches_uniform_patterns(top):
    check_against_patterns(top, "residue", (1, 2, 3))


@pytest.mark.parametrize("route", ["cramer", "general"])
def test_product_routes_include_padding(route):
    check_against_patterns((3, 1, 0), route, (1, 2), padded=True)


def test_residue_and_contour_forms_agree():
    top = (5, 3, 1, 0)
    Kr, Kc = interlacing_kernel(top, "residue"), interlacing_kernel(top, "contour")
    rng = np.random.default_rng(0)
    sites = interlacing_ground_set(top)
    for _ in range(20):
        x, y = (sites[i] for i in rng.integers(0, len(sites), 2))
        assert abs(complex(Kr(x, y)) - complex(Kc(x, y))) < 1e-10


def test_rejects_non_decreasing_top_row():
    with pytest.raises(ValueError):
        interlacing_kernel((1, 1))
    with pytest.raises(ValueError):
        interlacing_kernel((2, 0), route="unknown")


def test_pattern_type():
    p = GTPattern(((1,), (2, 0)))
    assert (2, 0) in p.particles() and (1, 1) in p.particles()
