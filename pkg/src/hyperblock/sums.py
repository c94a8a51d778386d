"""Exact sums of responsibility products over tuples of distinct nodes.

For a configuration ``c = (c_1, ..., c_m)`` the quantity

    T_c = sum over ordered tuples (i_1, ..., i_m) of pairwise-distinct nodes
          of tau[i_1, c_1] * ... * tau[i_m, c_m]

is needed for every configuration in both the VE and the M step.  Direct
enumeration costs O(n^m).  Inclusion-exclusion over the set partitions of
``{1..m}`` rewrites it through power sums ``P(b) = sum_i prod_{k in b}
tau[i, c_k]``, with Moebius weight ``(-1)^(|b|-1) (|b|-1)!`` per block, which
costs O(n) per configuration.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .exceptions import UnsupportedM
from .simplex import config_table

MAX_FACTORIZED_M = 4


def tuple_sum_naive(tau: np.ndarray, config) -> float:
    """Reference value of ``T_c`` by nested iteration (O(n^m))."""
    tau = np.asarray(tau, dtype=np.float64)
    cols = tau[:, list(config)]
    terms = [
        math.prod(cols[i, k] for k, i in enumerate(tup))
        for tup in itertools.permutations(range(tau.shape[0]), len(config))
    ]
    return math.fsum(terms)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for j in range(len(part)):
            yield part[:j] + [(first,) + part[j]] + part[j + 1 :]


@lru_cache(maxsize=None)
def partition_terms(m: int) -> tuple:
    """Set partitions of ``range(m)`` with their Moebius weights.

    >>> [w for _, w in partition_terms(3)]
    [1, -1, -1, -1, 2]
    """
    if m > MAX_FACTORIZED_M:
        raise UnsupportedM(f"factorized sums implemented for m <= {MAX_FACTORIZED_M}")
    terms = []
    for part in _set_partitions(tuple(range(m))):
        weight = math.prod((-1) ** (len(b) - 1) * math.factorial(len(b) - 1) for b in part)
        terms.append((tuple(sorted(part, key=lambda b: (len(b), b))), weight))
    terms.sort(key=lambda t: (len(t[0]), t[0]), reverse=True)
    return tuple(terms)


class _BlockCache:
    """Per-node products ``prod_k tau[i, g_k]`` keyed by sorted group tuple."""

    def __init__(self, tau):
        self.tau = np.asarray(tau, dtype=np.longdouble)
        self._node = {}
        self._total = {}

    def node(self, groups):
        key = tuple(sorted(groups))
        if key not in self._node:
            prod = self.tau[:, key[0]].copy()
            for g in key[1:]:
                prod = prod * self.tau[:, g]
            self._node[key] = prod
        return self._node[key]

    def total(self, groups):
        key = tuple(sorted(groups))
        if key not in self._total:
            self._total[key] = np.sum(self.node(key))
        return self._total[key]


def _factorized(cache, config):
    m = len(config)
    acc = np.longdouble(0)
    for part, weight in partition_terms(m):
        term = np.longdouble(weight)
        for block in part:
            term = term * cache.total([config[k] for k in block])
        acc += term
    return acc


def _leave_one_out(cache, config):
    m = len(config)
    acc = np.zeros(cache.tau.shape[0], dtype=np.longdouble)
    for part, weight in partition_terms(m):
        term = np.full(cache.tau.shape[0], weight, dtype=np.longdouble)
        for block in part:
            groups = [config[k] for k in block]
            term = term * (cache.total(groups) - cache.node(groups))
        acc += term
    return acc


def tuple_sum_factorized(tau: np.ndarray, config) -> float:
    """``T_c`` through power sums; agrees with :func:`tuple_sum_naive`."""
    config = tuple(int(q) for q in config)
    if len(config) > MAX_FACTORIZED_M:
        raise UnsupportedM(f"m={len(config)} > {MAX_FACTORIZED_M}; use tuple_sum_naive")
    if np.shape(tau)[0] < len(config):
        # no tuple of distinct nodes exists; skip the cancelling expansion
        return 0.0
    return float(_factorized(_BlockCache(tau), config))


def leave_one_out(tau: np.ndarray, config, i: int | None = None):
    """``T_c`` over tuples avoiding node ``i``.

    With ``i=None`` the values for every node are returned as a length-n
    array.  Each is obtained from the global power sums by subtracting the
    node's own contribution.
    """
    config = tuple(int(q) for q in config)
    if len(config) > MAX_FACTORIZED_M:
        raise UnsupportedM(f"m={len(config)} > {MAX_FACTORIZED_M}")
    if np.shape(tau)[0] - 1 < len(config):
        values = np.zeros(np.shape(tau)[0])
        return values if i is None else 0.0
    values = _leave_one_out(_BlockCache(tau), config)
    # tiny negative values can only come from cancellation
    values = np.maximum(values, 0).astype(np.float64)
    return values if i is None else float(values[i])


def all_tuple_sums(tau: np.ndarray, m: int) -> np.ndarray:
    """``T_c`` for every size-``m`` configuration, in rank order."""
    tau = np.asarray(tau)
    Q = tau.shape[1]
    table = config_table(Q, m)
    if m > MAX_FACTORIZED_M:
        return np.array([tuple_sum_naive(tau, row) for row in table])
    if len(tau) < m:
        return np.zeros(len(table))
    cache = _BlockCache(tau)
    out = np.array([_factorized(cache, tuple(row)) for row in table.tolist()])
    return np.maximum(out, 0).astype(np.float64)


def all_leave_one_out(tau: np.ndarray, m: int) -> np.ndarray:
    """``(n, C)`` matrix of leave-one-out sums for every size-``m`` configuration."""
    tau = np.asarray(tau)
    n, Q = tau.shape
    if m > MAX_FACTORIZED_M:
        raise UnsupportedM(f"m={m} > {MAX_FACTORIZED_M}")
    if m == 0:
        return np.ones((n, 1))
    if n - 1 < m:
        return np.zeros((n, multiset_count(Q, m)))
    cache = _BlockCache(tau)
    cols = [_leave_one_out(cache, tuple(row)) for row in config_table(Q, m).tolist()]
    return np.maximum(np.stack(cols, axis=1), 0).astype(np.float64)
