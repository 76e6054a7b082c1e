import itertools

import numpy as np
import pytest

from dimerdpp.dpp import FiniteKernel, conjugate, correlation
from dimerdpp.models.double_aztec import (
    DoubleAztecSpec,
    double_aztec_ground_set,
    double_aztec_kernel,
    double_aztec_levels,
    enumerate_outlier_law,
    reflected_aztec_term,
)
from dimerdpp.toeplitz import finite_m_kernel

ROUTES = ("aztec", "resolvent", "toeplitz", "general")


def test_spec_validation():
    with pytest.raises(ValueError):
        DoubleAztecSpec(0, 1)
    with pytest.raises(ValueError):
        DoubleAztecSpec(1, 0, a=1.0)
    with pytest.raises(ValueError):
        double_aztec_kernel(DoubleAztecSpec(1, 0), route="nope")


def test_outlier_law_is_probability():
    law = enumerate_outlier_law(DoubleAztecSpec(2, 1, 0.5))
    assert abs(sum(float(p) for p, _ in law) - 1) < 1e-12
    assert all(p > 0 for p, _ in law)


@pytest.mark.parametrize("n,m", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_routes_match_enumeration(n, m):
    spec = DoubleAztecSpec(n, m, 0.5)
    law = enumerate_outlier_law(spec)
    sites = double_aztec_ground_set(spec)
    probs = np.array([float(p) for p, _ in law])
    occ = np.array([[x in s for x in sites] for _, s in law])
    mats = [double_aztec_kernel(spec, r).matrix(sites) for r in ROUTES]
    for k in (1, 2, 3):
        for idx in itertools.combinations(range(len(sites)), k):
            freq = probs @ np.all(occ[:, idx], axis=1)
            for M in mats:
                assert abs(np.linalg.det(M[np.ix_(idx, idx)]) - freq) < 1e-8


def test_correction_vanishes_for_wide_strip():
    spec = DoubleAztecSpec(1, 6, 0.5)
    sites = [x for x in double_aztec_ground_set(spec) if abs(x[1]) <= 2]
    corr = finite_m_kernel(double_aztec_levels(spec), spec.paths).parts["correction"]
    assert max(abs(corr(*x, *y)) for x in sites for y in sites) < 1e-10
    K = double_aztec_kernel(spec)
    n, m, a = spec.n, spec.m, spec.a
    for (R, u), (S, v) in itertools.product(sites, repeat=2):
        r, e1 = divmod(R, 2)
        s, e2 = divmod(S, 2)
        ref = reflected_aztec_term(n + 1, a, (n + 1 - r, -e1, m + 1 - u), (n + 1 - s, -e2, m + 1 - v), S < R)
        assert abs(K((R, u), (S, v)) - ref) < 1e-10


def test_sign_gauge_leaves_correlations_unchanged():
    spec = DoubleAztecSpec(2, 1, 0.5)
    sites = double_aztec_ground_set(spec)
    K = FiniteKernel(sites, double_aztec_kernel(spec).matrix(sites))
    Kg = conjugate(K, lambda x: (-1.0) ** x[1])
    for k in (1, 2, 3):
        for pts in itertools.combinations(sites[::2], k):
            assert abs(correlation(K, pts) - correlation(Kg, pts)) < 1e-12
