import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerdpp.symfunc import (
    Partition,
    SkewShape,
    cauchy_binet_check,
    complete_symmetric,
    elementary_symmetric,
    exact_det,
    h_ones,
    interlaces,
    partitions_in_box,
    schur_bialternant,
    skew_schur,
    skew_schur_dual,
    vandermonde_det,
)

partitions = st.lists(st.integers(0, 4), max_size=4).map(lambda xs: Partition(sorted(xs, reverse=True)))


def test_partition_basics():
    lam = Partition([3, 1, 0, 0])
    assert lam.length() == 2
    assert lam.weight() == 4
    assert lam[0] == 3 and lam[5] == 0
    assert lam.conjugate() == Partition([2, 1, 1])


def test_partition_rejects_increasing_parts():
    with pytest.raises(ValueError):
        Partition([1, 2])


def test_elementary_symmetric_examples():
    assert elementary_symmetric(0, [7, 9]) == 1
    assert elementary_symmetric(3, [2, 3]) == 0
    assert elementary_symmetric(1, [2, 3]) == 5
    assert elementary_symmetric(2, [2, 3, 5]) == 6 + 10 + 15


def test_complete_symmetric_examples():
    assert complete_symmetric(-1, [1, 2]) == 0
    assert complete_symmetric(2, [1, 1]) == 3
    t = Fraction(2, 7)
    assert complete_symmetric(2, [t]) == t * t


@pytest.mark.parametrize("k,n", [(0, 3), (2, 2), (3, 4), (5, 1)])
def test_h_ones_counts_multisets(k, n):
    assert h_ones(k, n) == math.comb(k + n - 1, n - 1)
    assert h_ones(k, n) == complete_symmetric(k, [1] * n)


def test_skew_schur_examples():
    assert skew_schur(SkewShape(Partition(), Partition()), [3, 4]) == 1
    a, b = Fraction(1, 3), Fraction(2, 5)
    assert skew_schur(SkewShape(Partition([1]), Partition()), [a, b]) == a + b
    assert skew_schur(SkewShape(Partition([2, 1]), Partition([1])), [a]) == a**2


def test_interlaces_examples():
    assert interlaces(Partition([3, 1]), Partition([2, 1]))
    assert not interlaces(Partition([3, 1]), Partition([4]))
    assert interlaces(Partition([2, 2]), Partition([2, 2]))


@settings(max_examples=60, deadline=None)
@given(lam=partitions, mu=partitions, a=st.fractions(Fraction(1, 5), Fraction(3)))
def test_single_variable_skew_schur_is_interlacing_indicator(lam, mu, a):
    val = skew_schur(SkewShape(lam, mu), [a]) if lam.contains(mu) else 0
    expected = a ** (lam.weight() - mu.weight()) if interlaces(lam, mu) else 0
    assert val == expected


def test_jacobi_trudi_dual_forms_agree():
    rng = np.random.default_rng(3)
    x = list(rng.normal(size=4) + 1j * rng.normal(size=4))
    for size in range(1, 9):
        for lam in partitions_in_box(size, size):
            if lam.weight() != size:
                continue
            h = skew_schur(lam, x)
            e = skew_schur_dual(lam, x)
            assert abs(h - e) <= 1e-12 * max(1.0, abs(h))


def test_bialternant_matches_h_determinant():
    x = [0.3, -0.7, 1.1, 0.45]
    for lam in partitions_in_box(4, 3):
        h = skew_schur(lam, x)
        b = schur_bialternant(lam, x)
        assert abs(h - b) <= 1e-10 * max(1.0, abs(h))


def test_exact_det_and_vandermonde():
    rows = [[Fraction(2), Fraction(1)], [Fraction(1, 2), Fraction(3)]]
    assert exact_det(rows) == Fraction(11, 2)
    x = [1, 2, 4]
    expected = np.prod([x[j] - x[i] for i, j in itertools.combinations(range(3), 2)])
    assert abs(vandermonde_det(x)) == abs(expected)


def test_cauchy_binet_one_function():
    mu = {0: Fraction(1, 2), 1: Fraction(1, 3), 2: 2}
    f, g = (lambda x: x + 1,), (lambda x: 2 * x - 1,)
    lhs, rhs = cauchy_binet_check(f, g, mu)
    direct = sum(f[0](x) * g[0](x) * w for x, w in mu.items())
    assert lhs == rhs == direct


def test_cauchy_binet_more_functions_than_points():
    mu = {0: 1, 1: 2}
    fs = tuple(lambda x, k=k: x**k for k in range(3))
    lhs, rhs = cauchy_binet_check(fs, fs, mu)
    assert lhs == 0 and rhs == 0


def test_cauchy_binet_random_exact():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        size = int(rng.integers(n, 7))
        tab_f = rng.integers(-3, 4, size=(n, size))
        tab_g = rng.integers(-3, 4, size=(n, size))
        mu = {x: Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4))) for x in range(size)}
        f = tuple(lambda x, i=i: int(tab_f[i, x]) for i in range(n))
        g = tuple(lambda x, i=i: int(tab_g[i, x]) for i in range(n))
        lhs, rhs = cauchy_binet_check(f, g, mu)
        assert lhs == rhs
