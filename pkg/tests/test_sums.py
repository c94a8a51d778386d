import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hyperblock.exceptions import UnsupportedM
from hyperblock.simplex import config_table
from hyperblock.sums import (
    all_leave_one_out,
    all_tuple_sums,
    leave_one_out,
    partition_terms,
    tuple_sum_factorized,
    tuple_sum_naive,
)


def expanded_sum(tau, config):
    # written out independently of the library: ordered tuples of distinct nodes
    total = 0.0
    for nodes in itertools.permutations(range(len(tau)), len(config)):
        total += np.prod([tau[i, q] for i, q in zip(nodes, config)])
    return total


def row_stochastic(n, Q):
    return arrays(np.float64, (n, Q), elements=st.floats(0.01, 1.0)).map(
        lambda a: a / a.sum(axis=1, keepdims=True))


class TestNaive:
    def test_no_distinct_pair(self):
        assert tuple_sum_naive(np.ones((1, 2)) / 2, (0, 1)) == 0

    def test_hand_expansion(self):
        tau = np.random.default_rng(0).dirichlet([1, 1], size=4)
        assert tuple_sum_naive(tau, (0, 0, 1)) == pytest.approx(expanded_sum(tau, (0, 0, 1)), rel=1e-14)


class TestFactorized:
    def test_moebius_weights(self):
        assert [w for _, w in partition_terms(2)] == [1, -1]
        assert sorted(w for _, w in partition_terms(3)) == [-1, -1, -1, 1, 2]
        assert sum(1 for _ in partition_terms(4)) == 15

    def test_unsupported_m(self):
        with pytest.raises(UnsupportedM):
            tuple_sum_factorized(np.ones((6, 1)), (0,) * 5)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 9), st.integers(1, 3), st.integers(2, 4), st.data())
    def test_matches_naive(self, n, Q, m, data):
        tau = data.draw(row_stochastic(n, Q))
        config = tuple(sorted(data.draw(st.lists(st.integers(0, Q - 1), min_size=m, max_size=m))))
        exact = tuple_sum_naive(tau, config)
        got = tuple_sum_factorized(tau, config)
        assert got == pytest.approx(exact, rel=1e-10, abs=1e-300)

    @pytest.mark.parametrize("n, Q, m", [(6, 2, 2), (7, 3, 3), (6, 2, 4)])
    def test_total_mass(self, n, Q, m):
        tau = np.random.default_rng(n).dirichlet(np.ones(Q), size=n)
        # every ordered assignment sorts into exactly one configuration
        T = all_tuple_sums(tau, m)
        arrangements = [len(set(itertools.permutations(row))) for row in config_table(Q, m).tolist()]
        falling = np.prod(np.arange(n, n - m, -1))
        assert np.dot(T, arrangements) == pytest.approx(falling, rel=1e-12)


class TestLeaveOneOut:
    def test_two_nodes(self):
        tau = np.array([[0.3, 0.7], [0.6, 0.4]])
        np.testing.assert_array_equal(leave_one_out(tau, (0, 1)), [0.0, 0.0])

    def test_zero_row_equals_global(self):
        rng = np.random.default_rng(3)
        tau = rng.dirichlet([1, 1, 1], size=6)
        tau[2] = 0.0
        config = (0, 1, 2)
        assert leave_one_out(tau, config, 2) == pytest.approx(tuple_sum_factorized(tau, config), rel=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 9), st.integers(1, 3), st.integers(1, 4), st.data())
    def test_matches_removal(self, n, Q, m, data):
        tau = data.draw(row_stochastic(n, Q))
        config = tuple(sorted(data.draw(st.lists(st.integers(0, Q - 1), min_size=m, max_size=m))))
        loo = leave_one_out(tau, config)
        full = tuple_sum_naive(tau, config)
        for i in range(n):
            ref = tuple_sum_naive(np.delete(tau, i, axis=0), config)
            assert loo[i] == pytest.approx(ref, rel=1e-10, abs=1e-300)
            assert loo[i] <= full * (1 + 1e-12)

    def test_matrix_form(self):
        tau = np.random.default_rng(5).dirichlet([1, 1], size=7)
        L = all_leave_one_out(tau, 3)
        for r, row in enumerate(config_table(2, 3).tolist()):
            np.testing.assert_allclose(L[:, r], leave_one_out(tau, row), rtol=1e-14)
        np.testing.assert_array_equal(all_leave_one_out(tau, 0), np.ones((7, 1)))
