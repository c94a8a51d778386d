import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperblock.exceptions import InvalidConfig, Overflow
from hyperblock.simplex import (
    assignment_rank,
    config_table,
    merge_table,
    multiplicity,
    multiset_count,
    multiset_rank,
    multiset_unrank,
)


@pytest.mark.parametrize("Q, m, expected", [(2, 3, 4), (7, 7, 1716), (1, 5, 1), (3, 2, 6)])
def test_multiset_count(Q, m, expected):
    assert multiset_count(Q, m) == expected


def test_count_rejects_bad_input():
    with pytest.raises(InvalidConfig):
        multiset_count(0, 2)
    with pytest.raises(Overflow):
        multiset_count(10**6, 30)


def test_small_ranks():
    assert [multiset_rank(c, 2) for c in [(0, 0), (0, 1), (1, 1)]] == [0, 1, 2]


@pytest.mark.parametrize("Q, m", [(Q, m) for Q in range(1, 7) for m in range(1, 7)])
def test_rank_is_lexicographic_bijection(Q, m):
    configs = list(itertools.combinations_with_replacement(range(Q), m))
    ranks = [multiset_rank(c, Q) for c in configs]
    assert ranks == list(range(comb(Q + m - 1, m)))
    assert all(multiset_unrank(r, Q, m) == c for r, c in zip(ranks, configs))


@given(st.integers(1, 8), st.integers(1, 8), st.data())
def test_unrank_inverts_rank(Q, m, data):
    config = tuple(sorted(data.draw(st.lists(st.integers(0, Q - 1), min_size=m, max_size=m))))
    assert multiset_unrank(multiset_rank(config, Q), Q, m) == config


def test_config_table_and_multiplicity():
    np.testing.assert_array_equal(config_table(2, 3), [[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 1, 1]])
    np.testing.assert_array_equal(multiplicity(2, 3), [6, 2, 2, 6])


def test_assignment_rank_sorts_each_assignment():
    Q, m = 3, 3
    ranks = assignment_rank(Q, m)
    for code, assign in enumerate(itertools.product(range(Q), repeat=m)):
        assert ranks[code] == multiset_rank(sorted(assign), Q)


def test_merge_table():
    Q, m = 3, 3
    table = merge_table(Q, m)
    for r, small in enumerate(config_table(Q, m - 1).tolist()):
        for q in range(Q):
            assert table[r, q] == multiset_rank(sorted(small + [q]), Q)
    np.testing.assert_array_equal(merge_table(Q, 1), [[0, 1, 2]])


def test_last_rank():
    assert multiset_rank((2, 2, 2), 3) == multiset_count(3, 3) - 1 == 9


def test_lex_differs_from_colex():
    # (0, 2) precedes (1, 1) lexicographically but not in colex order
    assert multiset_rank((0, 2), 3) < multiset_rank((1, 1), 3)
