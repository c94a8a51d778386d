"""HSBM parameters, the generative sampler and exact likelihoods."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, xlog1py, xlogy

from .exceptions import InvalidConfig, TooLarge
from .hypergraph import Hypergraph
from .simplex import (
    assignment_rank,
    config_table,
    constant_configs,
    multiset_count,
    multiset_rank,
)

EPS_PROB = 1e-12
SUBMODELS = ("full", "affm", "aff")


def expand_affiliation(alpha, beta, Q: int, M: int) -> dict[int, np.ndarray]:
    """Flat tensors for the affiliation submodels.

    ``alpha``/``beta`` are either scalars (shared over sizes) or mappings
    ``m -> value``.  Constant configurations get alpha, all others beta.
    """
    out = {}
    for m in range(2, M + 1):
        a = alpha[m] if isinstance(alpha, dict) else alpha
        b = beta[m] if isinstance(beta, dict) else beta
        out[m] = np.where(constant_configs(Q, m), float(a), float(b))
    return out


@dataclass
class HsbmParams:
    """Group proportions and per-size symmetric connectivity tensors.

    ``B[m]`` is a flat vector indexed by multiset rank.  For the affiliation
    submodels ``alpha``/``beta`` hold the per-size values (identical across
    sizes for ``"aff"``) and ``B`` is their expansion.
    """

    pi: np.ndarray
    B: dict[int, np.ndarray]
    submodel: str = "full"
    alpha: dict[int, float] | None = None
    beta: dict[int, float] | None = None
    flags: list[str] = field(default_factory=list, compare=False)

    def __post_init__(self):
        self.pi = np.asarray(self.pi, dtype=np.float64)
        self.B = {int(m): np.asarray(v, dtype=np.float64) for m, v in self.B.items()}
        if self.submodel not in SUBMODELS:
            raise ValueError(f"unknown submodel {self.submodel!r}")
        if self.pi.ndim != 1 or len(self.pi) == 0:
            raise ValueError("pi must be a non-empty vector")
        if np.any(self.pi < 0) or not math.isclose(self.pi.sum(), 1.0, abs_tol=1e-9):
            raise ValueError("pi must be a probability vector")
        if sorted(self.B) != list(range(2, self.M + 1)):
            raise ValueError("B must hold sizes 2..M")
        for m, v in self.B.items():
            if v.shape != (multiset_count(self.Q, m),):
                raise ValueError(f"B[{m}] has shape {v.shape}")
            if np.any(v < 0) or np.any(v > 1):
                raise ValueError(f"B[{m}] has entries outside [0, 1]")

    @property
    def Q(self) -> int:
        return len(self.pi)

    @property
    def M(self) -> int:
        return max(self.B)

    @classmethod
    def affiliation(cls, pi, alpha, beta, M: int, shared: bool = False):
        Q = len(pi)
        if shared:
            a = {m: float(alpha) for m in range(2, M + 1)}
            b = {m: float(beta) for m in range(2, M + 1)}
        else:
            a = {m: float(alpha[m]) for m in range(2, M + 1)}
            b = {m: float(beta[m]) for m in range(2, M + 1)}
        B = expand_affiliation(a, b, Q, M)
        return cls(pi, B, "aff" if shared else "affm", a, b)

    def free_vector(self) -> np.ndarray:
        """Free parameters, used to monitor convergence of the VEM."""
        if self.submodel == "full":
            parts = [self.B[m] for m in sorted(self.B)]
        else:
            parts = [np.array([self.alpha[m], self.beta[m]]) for m in sorted(self.B)]
        return np.concatenate([self.pi, *parts])

    def permuted(self, perm) -> "HsbmParams":
        """Relabel groups so that old group ``g`` becomes ``perm[g]``."""
        perm = np.asarray(perm)
        pi = np.empty_like(self.pi)
        pi[perm] = self.pi
        B = {}
        for m, flat in self.B.items():
            ranks = assignment_rank(self.Q, m)
            codes = _codes(perm[config_table(self.Q, m)], self.Q)
            new = np.empty_like(flat)
            new[ranks[codes]] = flat
            B[m] = new
        return HsbmParams(pi, B, self.submodel, self.alpha, self.beta, list(self.flags))

    def to_dict(self) -> dict:
        out = {"Q": self.Q, "M": self.M, "pi": self.pi.tolist(), "submodel": self.submodel}
        if self.alpha is not None:
            out["alpha"] = {str(m): v for m, v in self.alpha.items()}
            out["beta"] = {str(m): v for m, v in self.beta.items()}
        out["B"] = {
            str(m): {
                "configs": config_table(self.Q, m).tolist(),
                "values": self.B[m].tolist(),
            }
            for m in sorted(self.B)
        }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "HsbmParams":
        Q = int(data["Q"])
        B = {}
        for key, block in data["B"].items():
            m = int(key)
            values = np.zeros(multiset_count(Q, m))
            for cfg, val in zip(block["configs"], block["values"]):
                values[multiset_rank(sorted(cfg), Q)] = val
            B[m] = values
        alpha = beta = None
        if "alpha" in data:
            alpha = {int(k): float(v) for k, v in data["alpha"].items()}
            beta = {int(k): float(v) for k, v in data["beta"].items()}
        return cls(data["pi"], B, data.get("submodel", "full"), alpha, beta)


def _codes(assign: np.ndarray, Q: int) -> np.ndarray:
    """Base-Q codes of ordered assignments (rows), first column most significant."""
    code = np.zeros(assign.shape[0], dtype=np.int64)
    for k in range(assign.shape[1]):
        code = code * Q + assign[:, k]
    return code


def config_ranks(assign: np.ndarray, Q: int) -> np.ndarray:
    """Multiset rank of each row of group labels, in any order."""
    assign = np.asarray(assign, dtype=np.int64)
    return assignment_rank(Q, assign.shape[1])[_codes(assign, Q)]


def get_prob(params: HsbmParams, config) -> float:
    """Connection probability of a configuration, invariant to its order."""
    labels = tuple(sorted(int(q) for q in config))
    m = len(labels)
    if m < 2 or m > params.M:
        raise InvalidConfig(f"size {m} outside 2..{params.M}")
    return float(params.B[m][multiset_rank(labels, params.Q)])


def iter_combinations(n: int, m: int, chunk: int = 1 << 18):
    """Lexicographic ``m``-subsets of ``range(n)`` as int arrays, in chunks."""
    it = itertools.combinations(range(n), m)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(it, chunk)), dtype=np.int64
        )
        if flat.size == 0:
            return
        yield flat.reshape(-1, m)


def sample_hsbm(params: HsbmParams, n: int, seed=None):
    """Draw ``(H, z)`` from the model.

    Latent groups are drawn first, then one uniform per node subset, sizes
    ascending and subsets in lexicographic order, all from a single stream.
    """
    if n < params.M:
        raise ValueError(f"n={n} must be at least M={params.M}")
    rng = np.random.default_rng(seed)
    z = rng.choice(params.Q, size=n, p=params.pi)
    edges = []
    for m in range(2, params.M + 1):
        probs = params.B[m]
        for block in iter_combinations(n, m):
            p = probs[config_ranks(z[block], params.Q)]
            hit = rng.random(len(block)) < p
            edges.extend(map(tuple, block[hit].tolist()))
    return Hypergraph(n, tuple(edges), M=params.M), z


def _clamped(params: HsbmParams, m: int, clamp: bool):
    B = params.B[m]
    return np.clip(B, EPS_PROB, 1 - EPS_PROB) if clamp else B


def config_counts(z: np.ndarray, Q: int, m: int) -> np.ndarray:
    """Number of node ``m``-subsets per configuration under hard labels ``z``."""
    sizes = np.bincount(z, minlength=Q)
    out = np.empty(multiset_count(Q, m))
    for r, row in enumerate(config_table(Q, m)):
        mult = np.bincount(row, minlength=Q)
        out[r] = math.prod(math.comb(int(s), int(k)) for s, k in zip(sizes, mult))
    return out


def edge_config_counts(H: Hypergraph, z: np.ndarray, Q: int, m: int) -> np.ndarray:
    edges = H.edges_of_size(m)
    if len(edges) == 0:
        return np.zeros(multiset_count(Q, m))
    return np.bincount(config_ranks(z[edges], Q), minlength=multiset_count(Q, m)).astype(float)


def complete_loglik(params: HsbmParams, H: Hypergraph, z, clamp: bool = True) -> float:
    """``log P(Y, Z = z)`` using per-configuration subset and edge counts.

    Probabilities are clamped to ``[1e-12, 1 - 1e-12]`` unless ``clamp`` is
    false, in which case impossible events give ``-inf``.
    """
    z = np.asarray(z, dtype=np.int64)
    if z.shape != (H.n,) or (H.n and (z.min() < 0 or z.max() >= params.Q)):
        raise InvalidConfig("z must hold one label in 0..Q-1 per node")
    if H.M > params.M and any(len(H.edges_of_size(m)) for m in range(params.M + 1, H.M + 1)):
        raise ValueError("hypergraph has edges larger than the model's M")
    with np.errstate(divide="ignore"):
        total = float(np.sum(np.log(params.pi[z])))
        for m in range(2, params.M + 1):
            B = _clamped(params, m, clamp)
            N = config_counts(z, params.Q, m)
            E = edge_config_counts(H, z, params.Q, m)
            total += float(np.sum(xlogy(E, B)) + np.sum(xlog1py(N - E, -B)))
    return total


def exact_loglik_small(params: HsbmParams, H: Hypergraph, limit: int = 10**7) -> float:
    """``log P(Y)`` by summing over all ``Q**n`` latent assignments.

    Every node subset is visited explicitly for every assignment, without
    clamping; intended as a brute-force oracle on tiny hypergraphs.
    """
    Q, n = params.Q, H.n
    if Q**n > limit:
        raise TooLarge(f"Q^n = {Q}^{n} exceeds {limit}")
    subsets = {m: np.array(list(itertools.combinations(range(n), m)), dtype=np.int64).reshape(-1, m)
               for m in range(2, params.M + 1)}
    present = {m: np.array([tuple(s) in H.edge_set for s in subsets[m].tolist()], dtype=float)
               for m in subsets}
    logs = []
    batch = max(1, 2**16 // max(1, n))
    assignments = itertools.product(range(Q), repeat=n)
    with np.errstate(divide="ignore"):
        logpi = np.log(params.pi)
        while True:
            Z = np.array(list(itertools.islice(assignments, batch)), dtype=np.int64).reshape(-1, n)
            if len(Z) == 0:
                break
            ll = logpi[Z].sum(axis=1)
            for m, S in subsets.items():
                if len(S) == 0:
                    continue
                ranks = assignment_rank(Q, m)[_codes(Z[:, S].reshape(-1, m), Q)]
                b = params.B[m][ranks].reshape(len(Z), len(S))
                y = present[m]
                ll = ll + np.sum(xlogy(y, b) + xlog1py(1 - y, -b), axis=1)
            logs.append(ll)
    return float(logsumexp(np.concatenate(logs)))
