"""Evaluation metrics: ARI, parameter MSRE and Kesten-Stigum quantities."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .exceptions import DimensionMismatch, LengthMismatch
from .model import HsbmParams


def contingency(labels_a, labels_b) -> np.ndarray:
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.shape} vs {b.shape}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max(initial=-1) + 1, ib.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def ari(labels_a, labels_b) -> float:
    """Hubert-Arabie adjusted Rand index.

    >>> ari([0, 0, 1, 1], [1, 1, 0, 0])
    1.0
    """
    table = contingency(labels_a, labels_b)
    n = int(table.sum())
    pairs = comb(n, 2)
    index = sum(comb(int(v), 2) for v in table.ravel())
    rows = sum(comb(int(v), 2) for v in table.sum(axis=1))
    cols = sum(comb(int(v), 2) for v in table.sum(axis=0))
    if pairs == 0:
        return 1.0
    expected = rows * cols / pairs
    maximum = (rows + cols) / 2
    if maximum == expected:
        # both partitions trivial (one block, or all singletons)
        return 1.0
    return float((index - expected) / (maximum - expected))


def best_permutation(labels_est, labels_true, Q: int) -> tuple[int, ...]:
    """Relabelling of estimated groups maximizing agreement with the truth.

    ``perm[g]`` is the true group matched to estimated group ``g``.
    Exhaustive over all ``Q!`` permutations; the first maximizer in
    lexicographic order wins.
    """
    if Q > 8:
        raise ValueError("exhaustive alignment supports Q <= 8")
    table = np.zeros((Q, Q), dtype=np.int64)
    np.add.at(table, (np.asarray(labels_est), np.asarray(labels_true)), 1)
    best, best_score = None, -1
    for perm in itertools.permutations(range(Q)):
        score = int(table[np.arange(Q), perm].sum())
        if score > best_score:
            best, best_score = perm, score
    return best


def msre(est: HsbmParams, labels_est, truth: HsbmParams, labels_true) -> float:
    """Sum of squared relative errors over free parameters, after alignment.

    Covers ``pi_1..pi_{Q-1}`` and every entry of every ``B[m]`` (full form).
    Averaging over replicates is left to the caller.
    """
    if est.Q != truth.Q or est.M != truth.M:
        raise DimensionMismatch(f"(Q, M) = {(est.Q, est.M)} vs {(truth.Q, truth.M)}")
    if len(labels_est) != len(labels_true):
        raise LengthMismatch("label vectors differ in length")
    aligned = est.permuted(best_permutation(labels_est, labels_true, est.Q))
    err = np.sum(((aligned.pi[:-1] - truth.pi[:-1]) / truth.pi[:-1]) ** 2)
    for m in truth.B:
        err += np.sum(((aligned.B[m] - truth.B[m]) / truth.B[m]) ** 2)
    return float(err)


def ks_thresholds(pi, alpha: float, beta: float, m: int, Q: int | None = None):
    """Uniform and proportion-weighted Kesten-Stigum quantities for size ``m``.

    Both are returned raw; recovery is conjectured possible above 1.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    pi = np.asarray(pi, dtype=np.float64)
    Q = len(pi) if Q is None else Q
    spread = (alpha - beta) ** 2
    qm = Q ** (m - 1)
    ks = (m - 1) * spread / (qm * (alpha + (qm - 1) * beta))
    s = float(np.sum(pi**m))
    ks_tilde = (m - 1) * s**2 * spread / (s * alpha + (1 - s) * beta)
    return float(ks), float(ks_tilde)
