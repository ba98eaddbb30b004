import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grassres.errors import InvalidEntry, InvalidParameters
from grassres.indexing import (ZERO, basic_variables, enumerate_indices, m_rank, normalize,
                               order_wp, parse_index, primary_index_set, upsilon)

subsets = st.integers(3, 7).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(1, n - 1)).flatmap(
        lambda t: st.tuples(st.just(t[0]), st.lists(st.integers(1, t[0]), min_size=t[1], max_size=t[1],
                                                    unique=True))))


def test_parse_forms():
    assert parse_index("145") == (1, 4, 5)
    assert parse_index("1.4.10") == (1, 4, 10)
    assert str(parse_index("1.4.10")) == "1.4.10"
    with pytest.raises(InvalidEntry):
        parse_index("41")


def test_normalize_sign_and_zero():
    assert normalize([2, 1]).sign == -1
    assert normalize([3, 1, 2]).sign == 1
    assert normalize([1, 1]) is ZERO


@given(subsets)
def test_roundtrip_str(t):
    n, raw = t
    u = parse_index(sorted(raw))
    assert parse_index(str(u)) == u


@given(subsets, st.randoms())
def test_normalize_sign_is_parity(t, rnd):
    # independent oracle: count transpositions of a bubble sort
    n, raw = t
    rnd.shuffle(raw)
    arr, swaps = list(raw), 0
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                swaps += 1
    s = normalize(raw, n)
    assert s.index == tuple(sorted(raw))
    assert s.sign == (-1) ** swaps


@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
def test_upsilon_partition(t):
    n, d = t
    m = parse_index(range(1, d + 1))
    assert len(primary_index_set(m, n)) == upsilon(d, n) == comb(n, d) - 1 - d * (n - d)
    assert len(basic_variables(m, n)) == d * (n - d)


@given(st.sampled_from([("123", 6), ("45", 5), ("135", 7), ("12", 5)]), st.data())
def test_wp_order_total(case, data):
    m, n = case
    m = parse_index(m)
    idx = enumerate_indices(len(m), n)
    u, v, w = (data.draw(st.sampled_from(idx)) for _ in range(3))
    assert order_wp(u, v, m) == -order_wp(v, u, m)
    assert (order_wp(u, v, m) == 0) == (u == v)
    if order_wp(u, v, m) < 0 and order_wp(v, w, m) < 0:
        assert order_wp(u, w, m) < 0


def test_primary_set_sorted_by_rank():
    m = parse_index("123")
    ranks = [m_rank(u, m) for u in primary_index_set(m, 7)]
    assert ranks == sorted(ranks) and ranks[0] == 0 and ranks[-1] == 1


def test_bad_parameters():
    with pytest.raises(InvalidParameters):
        enumerate_indices(3, 3)
    assert len(list(itertools.chain(enumerate_indices(2, 5)))) == 10
