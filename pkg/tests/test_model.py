import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from hyperblock.hypergraph import Hypergraph
from hyperblock.model import (
    HsbmParams,
    complete_loglik,
    config_counts,
    exact_loglik_small,
    expand_affiliation,
    get_prob,
    iter_combinations,
    sample_hsbm,
)
from hyperblock.simplex import multiset_count


def random_params(rng, Q, M, low=0.05, high=0.95):
    B = {m: rng.uniform(low, high, multiset_count(Q, m)) for m in range(2, M + 1)}
    return HsbmParams(rng.dirichlet(np.ones(Q)), B)


def all_hypergraphs(n, M):
    subsets = [s for m in range(2, M + 1) for s in itertools.combinations(range(n), m)]
    for mask in itertools.product((0, 1), repeat=len(subsets)):
        yield Hypergraph(n, tuple(s for s, keep in zip(subsets, mask) if keep), M=M)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            HsbmParams([0.5, 0.6], {2: [0.1, 0.2, 0.3]})
        with pytest.raises(ValueError):
            HsbmParams([0.5, 0.5], {2: [0.1, 0.2]})
        with pytest.raises(ValueError):
            HsbmParams([1.0], {2: [1.5]})

    @settings(max_examples=50)
    @given(st.integers(1, 4), st.integers(2, 4), st.data())
    def test_get_prob_is_order_invariant(self, Q, M, data):
        params = random_params(np.random.default_rng(Q * 10 + M), Q, M)
        config = data.draw(st.lists(st.integers(0, Q - 1), min_size=2, max_size=M))
        perm = data.draw(st.permutations(config))
        assert get_prob(params, config) == get_prob(params, perm)

    @pytest.mark.parametrize("Q, M", [(2, 3), (3, 4), (4, 2)])
    def test_affiliation_expansion(self, Q, M):
        B = expand_affiliation({m: 0.7 for m in range(2, M + 1)}, 0.1, Q, M)
        for m in range(2, M + 1):
            assert np.sum(B[m] == 0.7) == Q
            assert len(B[m]) == multiset_count(Q, m)
        flat = expand_affiliation(0.3, 0.3, Q, M)
        assert all(np.all(v == 0.3) for v in flat.values())

    def test_permuted_roundtrip(self):
        params = random_params(np.random.default_rng(1), 3, 3)
        perm = np.array([2, 0, 1])
        back = params.permuted(perm).permuted(np.argsort(perm))
        np.testing.assert_array_equal(back.pi, params.pi)
        for m in params.B:
            np.testing.assert_array_equal(back.B[m], params.B[m])

    def test_permuted_moves_probabilities(self):
        params = random_params(np.random.default_rng(2), 3, 3)
        perm = [1, 2, 0]
        moved = params.permuted(perm)
        for config in itertools.product(range(3), repeat=3):
            assert get_prob(moved, [perm[g] for g in config]) == get_prob(params, config)

    @pytest.mark.parametrize("shared", [False, True])
    def test_dict_roundtrip(self, shared):
        if shared:
            params = HsbmParams.affiliation([0.5, 0.5], 0.4, 0.1, 3, shared=True)
        else:
            params = random_params(np.random.default_rng(3), 2, 3)
        back = HsbmParams.from_dict(params.to_dict())
        assert back.submodel == params.submodel
        for m in params.B:
            np.testing.assert_array_equal(back.B[m], params.B[m])


class TestSampler:
    def test_zero_probabilities(self):
        params = HsbmParams([0.5, 0.5], {2: np.zeros(3), 3: np.zeros(4)})
        H, z = sample_hsbm(params, 6, seed=0)
        assert len(H.edges) == 0 and len(z) == 6

    def test_unit_probabilities(self):
        params = HsbmParams([0.5, 0.5], {2: np.ones(3), 3: np.ones(4)})
        H, _ = sample_hsbm(params, 4, seed=0)
        assert len(H.edges) == math.comb(4, 2) + math.comb(4, 3)

    def test_deterministic(self):
        params = random_params(np.random.default_rng(0), 2, 3, 0.01, 0.2)
        a = sample_hsbm(params, 20, seed=5)
        b = sample_hsbm(params, 20, seed=5)
        assert a[0].edges == b[0].edges and np.array_equal(a[1], b[1])

    def test_group_frequencies(self):
        pi = np.array([0.6, 0.3, 0.1])
        params = HsbmParams(pi, {2: np.full(6, 1e-4)})
        n = 2000
        _, z = sample_hsbm(params, n, seed=11)
        freq = np.bincount(z, minlength=3) / n
        assert np.all(np.abs(freq - pi) <= 3 * np.sqrt(pi * (1 - pi) / n))

    def test_iter_combinations_order(self):
        chunks = list(iter_combinations(5, 3, chunk=4))
        flat = np.concatenate(chunks)
        assert [tuple(r) for r in flat.tolist()] == list(itertools.combinations(range(5), 3))


class TestLikelihood:
    def test_single_edge(self):
        params = HsbmParams([1.0], {2: [0.3]})
        H = Hypergraph(2, ((0, 1),))
        assert complete_loglik(params, H, [0, 0]) == pytest.approx(math.log(0.3))

    def test_empty_graph(self):
        params = HsbmParams([0.4, 0.6], {2: [0.2, 0.5, 0.3]})
        z = np.array([0, 1, 1])
        expected = math.log(0.4) + 2 * math.log(0.6) + math.log(1 - 0.5) * 2 + math.log(1 - 0.3)
        assert complete_loglik(params, Hypergraph(3, (), M=2), z) == pytest.approx(expected)

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(4)
        for trial in range(10):
            params = random_params(rng, 3, 3)
            H, z = sample_hsbm(params, 7, seed=trial)
            direct = float(np.sum(np.log(params.pi[z])))
            for m in (2, 3):
                for s in itertools.combinations(range(7), m):
                    b = get_prob(params, z[list(s)])
                    direct += math.log(b) if s in H.edge_set else math.log(1 - b)
            assert complete_loglik(params, H, z) == pytest.approx(direct, rel=1e-12)

    def test_config_counts(self):
        z = np.array([0, 0, 1, 1, 1])
        # pairs: (0,0) -> 1, (0,1) -> 6, (1,1) -> 3
        np.testing.assert_array_equal(config_counts(z, 2, 2), [1, 6, 3])

    @pytest.mark.parametrize("n, M, Q", [(4, 3, 2), (3, 3, 2), (4, 2, 1)])
    def test_exact_likelihood_normalizes(self, n, M, Q):
        params = random_params(np.random.default_rng(n + M + Q), Q, M)
        values = [exact_loglik_small(params, H) for H in all_hypergraphs(n, M)]
        assert logsumexp(values) == pytest.approx(0.0, abs=1e-10)
