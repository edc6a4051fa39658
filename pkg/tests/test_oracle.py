import random
from fractions import Fraction

import pytest

from grsklab import oracle
from grsklab.arrays import PolygonalArray


def ones(m, n):
    return PolygonalArray.from_rows([[Fraction(1)] * n for _ in range(m)])


def binom(n, k):
    from math import comb

    return comb(n, k)


def test_partition_function_counts_paths():
    assert oracle.partition_function(ones(2, 2), 2, 2) == 2
    for m, n in [(3, 3), (2, 5), (4, 4)]:
        assert oracle.partition_function(ones(m, n), m, n) == binom(m + n - 2, m - 1)


def test_partition_function_hand_value():
    W = PolygonalArray.from_rows([[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]])
    # paths: 1*2*4 + 1*3*4
    assert oracle.partition_function(W, 2, 2) == 20


def test_partition_function_vs_enumeration():
    rng = random.Random(3)
    for m, n in [(2, 3), (4, 4), (5, 5), (3, 6)]:
        rows = [
            [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
            for _ in range(m)
        ]
        W = PolygonalArray.from_rows(rows)
        assert oracle.partition_function(W, m, n) == oracle.path_sum(W, m, n)


def test_last_passage():
    assert oracle.last_passage(ones(3, 3), 3, 3) == 5
    W = PolygonalArray.from_rows([[1.0, 2.0], [3.0, 4.0]])
    assert oracle.last_passage(W, 2, 2) == 8.0


def test_nonintersecting_r1_is_partition_function():
    rng = random.Random(5)
    rows = [
        [Fraction(rng.randint(1, 5), rng.randint(1, 5)) for _ in range(4)]
        for _ in range(3)
    ]
    W = PolygonalArray.from_rows(rows)
    assert oracle.nonintersecting_sum(W, 3, 4, 1) == oracle.partition_function(W, 3, 4)


def test_nonintersecting_full_rank_forced_cover():
    # r = m^n: the unique tuple covers every cell of the rectangle
    rng = random.Random(7)
    rows = [
        [Fraction(rng.randint(1, 5), rng.randint(1, 5)) for _ in range(3)]
        for _ in range(3)
    ]
    W = PolygonalArray.from_rows(rows)
    want = Fraction(1)
    for v in W.entries.values():
        want *= v
    assert oracle.nonintersecting_sum(W, 3, 3, 3) == want
    assert oracle.nonintersecting_sum(ones(2, 2), 2, 2, 2) == 1


def test_nonintersecting_r_out_of_range():
    with pytest.raises(ValueError):
        oracle.nonintersecting_sum(ones(2, 2), 2, 2, 3)


def test_enumerate_paths_shape():
    paths = oracle.enumerate_paths((1, 1), (3, 3))
    assert len(paths) == 6
    for p in paths:
        assert p[0] == (1, 1) and p[-1] == (3, 3) and len(p) == 5


def test_jacobian_rejects_bad_step():
    W = ones(2, 2)
    with pytest.raises(ValueError):
        oracle.numeric_jacobian_logdet(lambda X: X, W, h=1e-2)
