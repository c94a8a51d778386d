"""Ranking of sorted group multisets onto flat tensor indices.

A symmetric connectivity tensor of order ``m`` over ``Q`` groups has one free
entry per multiset ``q_1 <= ... <= q_m``.  Shifting the k-th label by ``k``
turns a multiset into a strictly increasing sequence drawn from
``{0, ..., Q + m - 2}``, i.e. an ``m``-combination, which is then ranked with
the combinatorial number system.  Ranks are 0-based and increase with the
lexicographic order of the multisets, so ``itertools.combinations_with_replacement``
enumerates them in rank order.

Group labels are 0-based throughout the package.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .exceptions import IndexOutOfRange, InvalidConfig, Overflow

_INDEX_MAX = np.iinfo(np.int64).max


def multiset_count(Q: int, m: int) -> int:
    """Number of multisets of size ``m`` over ``Q`` labels, ``C(Q+m-1, m)``."""
    if Q < 1 or m < 1:
        raise InvalidConfig(f"need Q >= 1 and m >= 1, got Q={Q}, m={m}")
    count = math.comb(Q + m - 1, m)
    if count > _INDEX_MAX:
        raise Overflow(f"C({Q + m - 1}, {m}) does not fit a 64-bit index")
    return count


def _check_config(config, Q):
    labels = tuple(int(q) for q in config)
    if not labels:
        raise InvalidConfig("empty configuration")
    if any(q < 0 or q >= Q for q in labels):
        raise InvalidConfig(f"labels {labels} outside 0..{Q - 1}")
    if any(a > b for a, b in zip(labels, labels[1:])):
        raise InvalidConfig(f"labels {labels} are not sorted")
    return labels


def multiset_rank(config, Q: int) -> int:
    """Lexicographic rank of a sorted multiset of 0-based labels.

    Examples
    --------
    >>> [multiset_rank(c, 2) for c in [(0, 0), (0, 1), (1, 1)]]
    [0, 1, 2]
    >>> multiset_rank((2, 2, 2), 3)
    9
    """
    labels = _check_config(config, Q)
    m = len(labels)
    N = Q + m - 1
    total = multiset_count(Q, m)
    # strict combination l_k = q_k + k, then its mirror image in {0..N-1}
    strict = [q + k for k, q in enumerate(labels)]
    mirrored = sorted(N - 1 - l for l in strict)
    colex = sum(math.comb(d, k + 1) for k, d in enumerate(mirrored))
    return total - 1 - colex


def multiset_unrank(index: int, Q: int, m: int) -> tuple[int, ...]:
    """Inverse of :func:`multiset_rank`."""
    total = multiset_count(Q, m)
    if not 0 <= index < total:
        raise IndexOutOfRange(f"index {index} outside 0..{total - 1}")
    N = Q + m - 1
    r = total - 1 - index
    mirrored = []
    hi = N - 1
    for k in range(m, 0, -1):
        d = hi
        while math.comb(d, k) > r:
            d -= 1
        mirrored.append(d)
        r -= math.comb(d, k)
        hi = d - 1
    strict = sorted(N - 1 - d for d in mirrored)
    return tuple(l - k for k, l in enumerate(strict))


@lru_cache(maxsize=None)
def config_table(Q: int, m: int) -> np.ndarray:
    """All multisets of size ``m`` as rows of an int array, in rank order."""
    rows = list(itertools.combinations_with_replacement(range(Q), m))
    table = np.array(rows, dtype=np.int64).reshape(len(rows), m)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def multiplicity(Q: int, m: int) -> np.ndarray:
    """``prod_k m_k!`` for every configuration, where ``m_k`` counts label k."""
    out = np.array(
        [
            math.prod(math.factorial(c) for c in np.bincount(row, minlength=Q))
            for row in config_table(Q, m)
        ],
        dtype=np.float64,
    )
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def assignment_rank(Q: int, m: int) -> np.ndarray:
    """Rank of the sorted configuration for every ordered assignment.

    Ordered assignments ``(q_1, ..., q_m)`` are encoded base ``Q`` with
    ``q_1`` most significant, matching ``itertools.product`` order.
    """
    codes = np.empty(Q**m, dtype=np.int64)
    lookup = {tuple(row): r for r, row in enumerate(config_table(Q, m).tolist())}
    for code, assign in enumerate(itertools.product(range(Q), repeat=m)):
        codes[code] = lookup[tuple(sorted(assign))]
    codes.setflags(write=False)
    return codes


@lru_cache(maxsize=None)
def assignment_grouping(Q: int, m: int) -> np.ndarray:
    """0/1 matrix (Q**m, C) summing ordered assignments into configurations."""
    ranks = assignment_rank(Q, m)
    G = np.zeros((Q**m, multiset_count(Q, m)))
    G[np.arange(Q**m), ranks] = 1.0
    G.setflags(write=False)
    return G


@lru_cache(maxsize=None)
def merge_table(Q: int, m: int) -> np.ndarray:
    """``merge[r, q]`` = rank of (config r of size m-1) + {q} among size-m configs.

    For ``m == 1`` the smaller configuration is empty and ``merge[0, q] = q``.
    """
    if m == 1:
        table = np.arange(Q, dtype=np.int64).reshape(1, Q)
    else:
        lookup = {tuple(row): r for r, row in enumerate(config_table(Q, m).tolist())}
        small = config_table(Q, m - 1).tolist()
        table = np.empty((len(small), Q), dtype=np.int64)
        for r, row in enumerate(small):
            for q in range(Q):
                table[r, q] = lookup[tuple(sorted(row + [q]))]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def constant_configs(Q: int, m: int) -> np.ndarray:
    """Boolean mask of configurations whose labels all coincide."""
    table = config_table(Q, m)
    mask = np.all(table == table[:, :1], axis=1)
    mask.setflags(write=False)
    return mask
