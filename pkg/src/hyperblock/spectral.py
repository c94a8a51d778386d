"""Spectral embeddings and k-means used to initialise (or replace) the VEM."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import log_softmax

from .exceptions import EigenFailure
from .hypergraph import Hypergraph, _incidence, size2_adjacency

SOFT_MIX = 0.9


def _fix_signs(vectors):
    # largest-magnitude entry positive, first one on ties
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _normalized_operator(A):
    deg = A.sum(axis=1)
    active = deg > 0
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[active] = 1.0 / np.sqrt(deg[active])
    return inv_sqrt[:, None] * A * inv_sqrt[None, :], active


def _eigh(N):
    try:
        return np.linalg.eigh(N)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def cooccurrence_matrix(H: Hypergraph) -> np.ndarray:
    """``A[i, j]`` = number of hyperedges holding both ``i`` and ``j``; zero diagonal."""
    if not H.edges:
        return np.zeros((H.n, H.n))
    inc = _incidence(H)
    A = (inc.T @ inc).toarray()
    np.fill_diagonal(A, 0.0)
    return A


def hyper_laplacian_embedding(H: Hypergraph, Q: int) -> np.ndarray:
    """Rows of the leading ``Q`` eigenvectors of ``D^-1/2 A D^-1/2``, unit-normalized.

    ``A`` is the co-occurrence matrix.  Isolated nodes keep zero rows.
    """
    if Q > H.n:
        raise ValueError(f"Q={Q} exceeds n={H.n}")
    A = cooccurrence_matrix(H)
    N, active = _normalized_operator(A)
    X = np.zeros((H.n, Q))
    if not active.any():
        return X
    sub = N[np.ix_(active, active)]
    values, vectors = _eigh(sub)
    order = np.argsort(-values, kind="stable")[:Q]
    V = _fix_signs(vectors[:, order])
    X[active, : V.shape[1]] = V
    norms = np.linalg.norm(X, axis=1)
    nonzero = norms > 1e-12
    X[nonzero] /= norms[nonzero, None]
    X[~nonzero] = 0.0
    return X


class KMeansResult(NamedTuple):
    centers: np.ndarray
    labels: np.ndarray
    inertia: float
    restart_inertias: np.ndarray


def _kmeans_pp(X, k, rng):
    n = len(X)
    centers = [X[rng.integers(n)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return np.array(centers)


def _sq_dist(X, centers):
    return np.maximum(
        np.sum(X**2, axis=1)[:, None] - 2 * X @ centers.T + np.sum(centers**2, axis=1)[None, :],
        0.0,
    )


def _lloyd(X, centers, max_iter=300, tol=1e-10):
    for _ in range(max_iter):
        labels = np.argmin(_sq_dist(X, centers), axis=1)
        new = centers.copy()
        for q in range(len(centers)):
            members = labels == q
            if members.any():
                new[q] = X[members].mean(axis=0)
        shift = np.max(np.abs(new - centers))
        centers = new
        if shift <= tol:
            break
    d2 = _sq_dist(X, centers)
    labels = np.argmin(d2, axis=1)
    return centers, labels, float(d2[np.arange(len(X)), labels].sum())


def kmeans(X: np.ndarray, k: int, restarts: int = 100, seed=None) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding; the lowest-inertia restart wins.

    Each restart has its own child seed, so the outcome does not depend on
    the order in which restarts are evaluated.  Ties keep the lowest restart
    index.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    children = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    inertias = np.empty(restarts)
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        centers, labels, inertia = _lloyd(X, _kmeans_pp(X, k, rng))
        inertias[r] = inertia
        if best is None or inertia < best[2]:
            best = (centers, labels, inertia)
    return KMeansResult(best[0], best[1], best[2], inertias)


def soft_kmeans(X: np.ndarray, Q: int, restarts: int = 100, seed=None) -> np.ndarray:
    """Soft responsibilities from the best k-means solution on the rows of ``X``.

    ``tau[i, q]`` is proportional to ``exp(-|x_i - mu_q|^2 / s)`` with ``s``
    the mean squared distance of points to their own centroid (floored at
    1e-8).  All-zero rows get uniform responsibilities.
    """
    X = np.asarray(X, dtype=np.float64)
    n = len(X)
    tau = np.full((n, Q), 1.0 / Q)
    if Q == 1:
        return np.ones((n, 1))
    rows = np.linalg.norm(X, axis=1) > 0
    if not rows.any():
        return tau
    Xa = X[rows]
    result = kmeans(Xa, Q, restarts, seed)
    d2 = _sq_dist(Xa, result.centers)
    scale = max(result.inertia / len(Xa), 1e-8)
    tau[rows] = np.exp(log_softmax(-d2 / scale, axis=1))
    return tau


def absolute_spectral_init(H: Hypergraph, Q: int, seed=None, restarts: int = 100) -> np.ndarray:
    """Absolute spectral clustering of the size-2 slice, softened towards uniform.

    Eigenvectors of the normalized adjacency for the ``Q`` eigenvalues of
    largest magnitude are clustered with hard k-means; the one-hot result is
    mixed as ``0.9 * onehot + 0.1 / Q``.  Nodes without size-2 edges get
    uniform rows.
    """
    if Q > H.n:
        raise ValueError(f"Q={Q} exceeds n={H.n}")
    tau = np.full((H.n, Q), 1.0 / Q)
    if Q == 1:
        return np.ones((H.n, 1))
    N, active = _normalized_operator(size2_adjacency(H))
    if not active.any():
        return tau
    values, vectors = _eigh(N[np.ix_(active, active)])
    order = np.argsort(-np.abs(values), kind="stable")[:Q]
    X = _fix_signs(vectors[:, order])
    labels = kmeans(X, Q, restarts, seed).labels
    onehot = np.eye(Q)[labels]
    tau[active] = SOFT_MIX * onehot + (1 - SOFT_MIX) / Q
    return tau
