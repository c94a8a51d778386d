"""Variational EM for the hypergraph stochastic blockmodel.

The ELBO is written per unordered node subset and per ordered group
assignment of its nodes, so every (subset, assignment) pair is weighted
once.  Grouping the assignments by sorted configuration ``c`` gives, for
the non-edge bulk, ``T_c / prod_k m_k!(c)`` where ``T_c`` is the
distinct-tuple sum from :mod:`hyperblock.sums`.  Observed hyperedges are
handled explicitly, so the cost of one sweep is linear in ``n`` plus the
number of hyperedges.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .exceptions import DegenerateConfig
from .hypergraph import Hypergraph
from .model import EPS_PROB, HsbmParams, _codes, expand_affiliation
from .simplex import (
    assignment_grouping,
    assignment_rank,
    config_table,
    constant_configs,
    merge_table,
    multiplicity,
)
from .sums import all_leave_one_out, all_tuple_sums

logger = logging.getLogger(__name__)

TAU_FLOOR = 1e-12
DENOM_FLOOR = 1e-300
INITS = ("random", "spectral", "absolute")


@dataclass
class FitConfig:
    epsilon: float = 1e-6
    U_max: int = 50
    T_max: int = 50
    init: str = "spectral"
    submodel: str = "full"
    seed: int | None = 0
    kmeans_restarts: int = 100

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.U_max < 1 or self.T_max < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.init not in INITS + ("all",):
            raise ValueError(f"unknown init {self.init!r}")
        if self.submodel not in ("full", "affm", "aff"):
            raise ValueError(f"unknown submodel {self.submodel!r}")


@dataclass
class FitResult:
    params: HsbmParams
    tau: np.ndarray
    labels: np.ndarray
    elbo_trace: list[float]
    converged: bool
    reason: str
    seed: int | None
    init: str
    n_iter: int = 0
    icl: dict = field(default_factory=dict)

    @property
    def elbo(self) -> float:
        return self.elbo_trace[-1]

    def to_dict(self) -> dict:
        out = self.params.to_dict()
        out.update(
            tau=self.tau.tolist(),
            labels=self.labels.tolist(),
            elbo_trace=list(self.elbo_trace),
            icl=self.icl,
            converged=self.converged,
            reason=self.reason,
            seed=self.seed,
            init=self.init,
        )
        return out


class VEResult(NamedTuple):
    tau: np.ndarray
    iterations: int
    converged: bool
    first_shift: float


def hard_labels(tau: np.ndarray) -> np.ndarray:
    """Row-wise argmax; ties go to the lowest group index."""
    return np.argmax(tau, axis=1)


def normalize_rows(tau: np.ndarray) -> np.ndarray:
    tau = np.maximum(tau, TAU_FLOOR)
    return tau / tau.sum(axis=1, keepdims=True)


def _log_probs(params, m):
    B = np.clip(params.B[m], EPS_PROB, 1 - EPS_PROB)
    return np.log(B), np.log1p(-B)


def _outer_rows(tau, nodes):
    """Row-wise outer products of tau over the columns of ``nodes``: (E, Q**k)."""
    E, k = nodes.shape
    Q = tau.shape[1]
    if k == 0:
        return np.ones((E, 1))
    w = tau[nodes[:, 0]]
    for j in range(1, k):
        w = (w[:, :, None] * tau[nodes[:, j]][:, None, :]).reshape(E, -1)
    return w


def edge_config_weights(tau, edges, Q):
    """Assignment weight of every configuration on every hyperedge: (E, C)."""
    m = edges.shape[1]
    return _outer_rows(tau, edges) @ assignment_grouping(Q, m)


def _entropy_prior(params, tau):
    return float(np.sum(xlogy(tau, params.pi[None, :]) - xlogy(tau, tau)))


def _bulk_weights(tau, m):
    """Total assignment weight of each configuration over all m-subsets."""
    Q = tau.shape[1]
    return all_tuple_sums(tau, m) / multiplicity(Q, m)


def elbo(params: HsbmParams, tau: np.ndarray, H: Hypergraph, method: str = "sparse") -> float:
    """Evidence lower bound ``J(theta, tau)``."""
    tau = np.asarray(tau, dtype=np.float64)
    if method == "naive":
        return _elbo_naive(params, tau, H)
    total = _entropy_prior(params, tau)
    Q = params.Q
    for m in range(2, params.M + 1):
        logB, log1mB = _log_probs(params, m)
        total += float(_bulk_weights(tau, m) @ log1mB)
        edges = H.edges_of_size(m)
        if len(edges):
            W = edge_config_weights(tau, edges, Q).sum(axis=0)
            total += float(W @ (logB - log1mB))
    return total


def _elbo_naive(params, tau, H):
    """Dense path: every node subset, every ordered assignment."""
    total = _entropy_prior(params, tau)
    Q, n = params.Q, tau.shape[0]
    for m in range(2, params.M + 1):
        subsets = np.array(list(itertools.combinations(range(n), m)), dtype=np.int64).reshape(-1, m)
        if len(subsets) == 0:
            continue
        y = np.array([tuple(s) in H.edge_set for s in subsets.tolist()], dtype=float)
        logB, log1mB = _log_probs(params, m)
        ranks = assignment_rank(Q, m)
        f = y[:, None] * logB[ranks][None, :] + (1 - y)[:, None] * log1mB[ranks][None, :]
        total += float(np.sum(_outer_rows(tau, subsets) * f))
    return total


def ve_update(params: HsbmParams, tau: np.ndarray, H: Hypergraph, method: str = "sparse"):
    """One simultaneous fixed-point update of all responsibilities."""
    tau = np.asarray(tau, dtype=np.float64)
    if method == "naive":
        logits = _ve_logits_naive(params, tau, H)
    else:
        logits = _ve_logits(params, tau, H)
    logits = logits - logits.max(axis=1, keepdims=True)
    new = np.exp(logits)
    return normalize_rows(new / new.sum(axis=1, keepdims=True))


def _ve_logits(params, tau, H):
    n, Q = tau.shape
    logits = np.tile(np.log(np.maximum(params.pi, 1e-300)), (n, 1))
    for m in range(2, params.M + 1):
        logB, log1mB = _log_probs(params, m)
        merge = merge_table(Q, m)
        # all (m-1)-subsets of the other nodes, as if no hyperedge were present
        loo = all_leave_one_out(tau, m - 1) / multiplicity(Q, m - 1)
        logits += loo @ log1mB[merge]
        edges = H.edges_of_size(m)
        if len(edges) == 0:
            continue
        gain = (logB - log1mB)[merge]
        group_small = assignment_grouping(Q, m - 1)
        for k in range(m):
            others = np.delete(edges, k, axis=1)
            W = _outer_rows(tau, others) @ group_small
            np.add.at(logits, edges[:, k], W @ gain)
    return logits


def _ve_logits_naive(params, tau, H):
    n, Q = tau.shape
    logits = np.tile(np.log(np.maximum(params.pi, 1e-300)), (n, 1))
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        for m in range(2, params.M + 1):
            logB, log1mB = _log_probs(params, m)
            ranks = assignment_rank(Q, m)
            for T in itertools.combinations(rest, m - 1):
                present = tuple(sorted((i,) + T)) in H.edge_set
                f = logB if present else log1mB
                for assign in itertools.product(range(Q), repeat=m - 1):
                    w = np.prod([tau[j, a] for j, a in zip(T, assign)])
                    for q in range(Q):
                        code = _codes(np.array([(q,) + assign]), Q)[0]
                        logits[i, q] += w * f[ranks[code]]
    return logits


def ve_fixed_point(params: HsbmParams, tau0: np.ndarray, H: Hypergraph, cfg: FitConfig | None = None):
    """Iterate the VE fixed-point map until ``max |delta tau| <= epsilon``.

    Each sweep proposes the simultaneous update of every row.  A proposal
    that would lower the ELBO is pulled back towards the current point by
    halving the step; per row the proposal is the exact maximiser of the
    concave row objective, so the direction always ascends.  Convergence is
    measured on the undamped proposal, i.e. on the fixed-point residual.
    """
    cfg = cfg or FitConfig()
    tau = normalize_rows(np.asarray(tau0, dtype=np.float64))
    current = elbo(params, tau, H)
    first_shift = np.inf
    for u in range(1, cfg.U_max + 1):
        proposal = ve_update(params, tau, H)
        shift = float(np.max(np.abs(proposal - tau)))
        if u == 1:
            first_shift = shift
        step, candidate = 1.0, proposal
        value = elbo(params, candidate, H)
        slack = 1e-13 * max(1.0, abs(current))
        while value < current - slack and step > 1e-6:
            step /= 2
            candidate = normalize_rows((1 - step) * tau + step * proposal)
            value = elbo(params, candidate, H)
        if value >= current - slack:
            tau, current = candidate, value
        if shift <= cfg.epsilon:
            return VEResult(tau, u, True, first_shift)
    return VEResult(tau, cfg.U_max, False, first_shift)


def _sufficient_stats(tau, H, M):
    """Per size: (observed weight per config, total weight per config)."""
    Q = tau.shape[1]
    stats = {}
    for m in range(2, M + 1):
        den = _bulk_weights(tau, m)
        edges = H.edges_of_size(m)
        num = edge_config_weights(tau, edges, Q).sum(axis=0) if len(edges) else np.zeros_like(den)
        stats[m] = (num, den)
    return stats


def _ratio(num, den, label, flags):
    if den < DENOM_FLOOR:
        flags.append(label)
        warnings.warn(f"empty configuration pool for {label}", DegenerateConfig, stacklevel=3)
        return EPS_PROB
    return float(np.clip(num / den, EPS_PROB, 1 - EPS_PROB))


def m_step_full(tau: np.ndarray, H: Hypergraph, M: int | None = None) -> HsbmParams:
    """Closed-form maximiser of the ELBO in (pi, B) for fixed tau."""
    tau = np.asarray(tau, dtype=np.float64)
    M = M or H.M
    flags: list[str] = []
    B = {}
    Q = tau.shape[1]
    for m, (num, den) in _sufficient_stats(tau, H, M).items():
        table = config_table(Q, m)
        B[m] = np.array([
            _ratio(num[r], den[r], f"B[{m}]{tuple(table[r].tolist())}", flags) for r in range(len(den))
        ])
    params = HsbmParams(tau.mean(axis=0) / tau.mean(axis=0).sum(), B, "full")
    params.flags = flags
    return params


def m_step_affiliation(tau: np.ndarray, H: Hypergraph, variant: str = "affm", M: int | None = None) -> HsbmParams:
    """Closed-form maximiser under the affiliation submodels.

    ``variant="affm"`` pools constant (alpha) and mixed (beta) configurations
    per size; ``"aff"`` pools additionally over sizes.
    """
    if variant not in ("affm", "aff"):
        raise ValueError(f"unknown affiliation variant {variant!r}")
    tau = np.asarray(tau, dtype=np.float64)
    M = M or H.M
    Q = tau.shape[1]
    flags: list[str] = []
    pooled = {}
    for m, (num, den) in _sufficient_stats(tau, H, M).items():
        const = constant_configs(Q, m)
        pooled[m] = (num[const].sum(), den[const].sum(), num[~const].sum(), den[~const].sum())
    if variant == "aff":
        totals = np.sum(list(pooled.values()), axis=0)
        a = _ratio(totals[0], totals[1], "alpha", flags)
        b = _ratio(totals[2], totals[3], "beta", flags)
        alpha = {m: a for m in pooled}
        beta = {m: b for m in pooled}
    else:
        alpha = {m: _ratio(v[0], v[1], f"alpha[{m}]", flags) for m, v in pooled.items()}
        beta = {m: _ratio(v[2], v[3], f"beta[{m}]", flags) for m, v in pooled.items()}
    pi = tau.mean(axis=0)
    params = HsbmParams(pi / pi.sum(), expand_affiliation(alpha, beta, Q, M), variant, alpha, beta)
    params.flags = flags
    return params


def m_step(tau, H, submodel="full", M=None):
    if submodel == "full":
        return m_step_full(tau, H, M)
    return m_step_affiliation(tau, H, submodel, M)


def init_random(n: int, Q: int, seed=None) -> np.ndarray:
    """Rows drawn uniformly on (0, 1) and normalized."""
    rng = np.random.default_rng(seed)
    tau = rng.uniform(size=(n, Q))
    return tau / tau.sum(axis=1, keepdims=True)


def initial_tau(H: Hypergraph, Q: int, init: str, cfg: FitConfig) -> np.ndarray:
    from . import spectral

    if init == "random":
        return init_random(H.n, Q, cfg.seed)
    if init == "spectral":
        X = spectral.hyper_laplacian_embedding(H, Q)
        return spectral.soft_kmeans(X, Q, cfg.kmeans_restarts, cfg.seed)
    if init == "absolute":
        return spectral.absolute_spectral_init(H, Q, cfg.seed, cfg.kmeans_restarts)
    raise ValueError(f"unknown init {init!r}")


def run_vem(H: Hypergraph, tau0: np.ndarray, cfg: FitConfig, init_name: str = "custom") -> FitResult:
    """VEM from a given initial tau, starting with an M step."""
    tau = normalize_rows(np.asarray(tau0, dtype=np.float64))
    params = m_step(tau, H, cfg.submodel)
    trace = [elbo(params, tau, H)]
    converged, reason, t = False, "max_iter", 0
    for t in range(1, cfg.T_max + 1):
        ve = ve_fixed_point(params, tau, H, cfg)
        tau = ve.tau
        new_params = m_step(tau, H, cfg.submodel)
        trace.append(elbo(new_params, tau, H))
        d_elbo = abs(trace[-2] - trace[-1]) / max(abs(trace[-1]), 1e-300)
        d_theta = float(np.max(np.abs(new_params.free_vector() - params.free_vector())))
        params = new_params
        logger.debug("iter %d elbo %.10g d_elbo %.3g d_theta %.3g first_shift %.3g",
                     t, trace[-1], d_elbo, d_theta, ve.first_shift)
        if d_elbo <= cfg.epsilon and d_theta <= cfg.epsilon and ve.first_shift <= cfg.epsilon:
            converged, reason = True, "tolerance"
            break
    return FitResult(params, tau, hard_labels(tau), trace, converged, reason, cfg.seed,
                     init_name, n_iter=t)


def fit(H: Hypergraph, Q: int, cfg: FitConfig | None = None) -> FitResult:
    """Fit a ``Q``-group HSBM; with ``init="all"`` keep the best-ELBO run."""
    cfg = cfg or FitConfig()
    if Q < 1:
        raise ValueError("Q must be >= 1")
    inits = INITS if cfg.init == "all" else (cfg.init,)
    best = None
    for name in inits:
        result = run_vem(H, initial_tau(H, Q, name, cfg), cfg, name)
        # strict improvement keeps the earlier init on ties
        if best is None or result.elbo > best.elbo:
            best = result
    return best
