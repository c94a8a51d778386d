"""Synthetic benchmarks: sparse affiliation scenarios and line-clustering hypergraphs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import BudgetExhausted, InvalidScenario, UnknownScenario
from .hypergraph import Hypergraph
from .model import HsbmParams

PI_2 = (0.6, 0.4)
PI_3 = (0.4, 0.3, 0.3)
REFERENCE_N = 50


@dataclass(frozen=True)
class Scenario:
    """Sparse Aff-m scenario with within/between hyperedge ratio ``rho``.

    ``alpha0`` is the within-group pair probability at ``n = 50``.  The
    between-group and size-3 values follow from keeping the expected ratio
    of within to between hyperedges equal to ``rho`` for ``m = 2, 3`` and
    every ``n``.
    """

    name: str
    pi: tuple[float, ...]
    alpha0: float
    rho: float
    M: int = 3

    @property
    def Q(self) -> int:
        return len(self.pi)

    def power_sum(self, m: int) -> float:
        return float(sum(p**m for p in self.pi))

    @property
    def beta0(self) -> float:
        s2 = self.power_sum(2)
        return self.alpha0 / self.rho * s2 / (1 - s2)

    @property
    def c(self) -> float:
        s2, s3 = self.power_sum(2), self.power_sum(3)
        return s2 / (1 - s2) * (1 - s3) / s3


SCENARIOS = {
    "A2": Scenario("A2", PI_2, 0.70, 1.20),
    "A3": Scenario("A3", PI_3, 0.30, 1.70),
    "A3'": Scenario("A3'", PI_3, 0.70, 1.20),
    "B2": Scenario("B2", PI_2, 0.30, 0.50),
    "B3": Scenario("B3", PI_3, 0.40, 0.25),
}


def make_scenario(name: str) -> Scenario:
    key = name.replace("p", "'") if name.endswith("p") else name
    try:
        return SCENARIOS[key]
    except KeyError:
        raise UnknownScenario(name) from None


def scenario_params(s: Scenario, n: int) -> dict:
    """``alpha[m]``, ``beta[m]`` and expected hyperedge counts ``E[m]`` at size ``n``."""
    if n < 3:
        raise InvalidScenario("n must be at least 3")
    scale = REFERENCE_N / n
    alpha = {2: s.alpha0 * scale, 3: s.c * s.alpha0 * scale / n}
    beta = {2: s.beta0 * scale, 3: s.beta0 * scale / n}
    for m in (2, 3):
        if not (0 <= alpha[m] <= 1 and 0 <= beta[m] <= 1):
            raise InvalidScenario(f"{s.name} at n={n}: probabilities outside [0, 1]")
    within = {m: math.comb(n, m) * alpha[m] * s.power_sum(m) for m in (2, 3)}
    between = {m: math.comb(n, m) * beta[m] * (1 - s.power_sum(m)) for m in (2, 3)}
    expected = {m: within[m] + between[m] for m in (2, 3)}
    return {"alpha": alpha, "beta": beta, "E": expected, "E_within": within, "E_between": between}


def scenario_model(s: Scenario, n: int) -> HsbmParams:
    """Aff-m parameters of the scenario at size ``n``."""
    values = scenario_params(s, n)
    return HsbmParams.affiliation(s.pi, values["alpha"], values["beta"], s.M)


@dataclass
class LineDataset:
    points: np.ndarray
    labels: np.ndarray
    lines: np.ndarray
    noise_label: int


def _boundary_point(t):
    # t in [0, 4): walk the square's perimeter side by side
    side, u = int(t), t - int(t)
    x = (-0.5 + u, 0.5, 0.5 - u, -0.5)[side]
    y = (-0.5, -0.5 + u, 0.5, 0.5 - u)[side]
    return np.array([x, y]), side


def gen_line_points(num_lines: int, pts_per_line: int, noise_pts: int,
                    noise_sd: float = 0.01, seed=None) -> LineDataset:
    """Points scattered around random chords of ``[-0.5, 0.5]^2`` plus uniform noise.

    Each chord joins two uniform points on the boundary lying on different
    sides.  Points on a chord are uniform along it, jittered by isotropic
    Gaussian noise and clipped to the square.  Noise points get label
    ``num_lines``.
    """
    rng = np.random.default_rng(seed)
    lines, pts, labels = [], [], []
    for k in range(num_lines):
        while True:
            a, sa = _boundary_point(rng.uniform(0, 4))
            b, sb = _boundary_point(rng.uniform(0, 4))
            if sa != sb:
                break
        lines.append(np.concatenate([a, b]))
        u = rng.uniform(size=(pts_per_line, 1))
        p = a + u * (b - a) + rng.normal(0.0, noise_sd, size=(pts_per_line, 2))
        pts.append(np.clip(p, -0.5, 0.5))
        labels += [k] * pts_per_line
    pts.append(rng.uniform(-0.5, 0.5, size=(noise_pts, 2)))
    labels += [num_lines] * noise_pts
    return LineDataset(
        np.concatenate(pts).reshape(-1, 2),
        np.array(labels, dtype=np.int64),
        np.array(lines).reshape(-1, 4),
        num_lines,
    )


def line_dissimilarity(p_i, p_j, p_k) -> float:
    """Mean orthogonal distance of three points to their total-least-squares line."""
    P = np.array([p_i, p_j, p_k], dtype=np.float64)
    centered = P - P.mean(axis=0)
    _, vecs = np.linalg.eigh(centered.T @ centered)
    normal = vecs[:, 0]
    return float(np.mean(np.abs(centered @ normal)))


def _triplet_dissimilarity(points, triplets):
    P = points[triplets]
    centered = P - P.mean(axis=1, keepdims=True)
    cov = np.einsum("tki,tkj->tij", centered, centered)
    _, vecs = np.linalg.eigh(cov)
    normal = vecs[:, :, 0]
    return np.mean(np.abs(np.einsum("tki,ti->tk", centered, normal)), axis=1)


class LineHypergraph(NamedTuple):
    H: Hypergraph
    labels: np.ndarray
    isolated: np.ndarray
    n_signal: int
    n_noise: int


TARGET_EDGES = {2: 1071, 3: 588}


def build_line_hypergraph(ds: LineDataset, sigma2: float = 0.04, eps: float = 0.999,
                          snr: float = 2.0, target_edges: int | None = None, seed=None,
                          budget: int | None = None) -> LineHypergraph:
    """3-uniform hypergraph of nearly aligned triplets.

    Uniform random triplets whose kernel similarity ``exp(-d^2 / sigma2)``
    exceeds ``eps`` become candidates.  A candidate is signal when its three
    points share a line label and noise otherwise; candidates are accepted
    until ``target_edges * snr / (snr + 1)`` signal and the remaining noise
    hyperedges are reached.  Raises :class:`BudgetExhausted` if ``budget``
    draws do not fill both quotas.
    """
    n = len(ds.points)
    if n < 3:
        raise ValueError("need at least 3 points")
    if target_edges is None:
        target_edges = TARGET_EDGES.get(len(ds.lines), 1000)
    quota_signal = int(round(target_edges * snr / (snr + 1)))
    quota_noise = target_edges - quota_signal
    if budget is None:
        budget = 50 * math.comb(n, 3)
    d_max2 = -sigma2 * math.log(eps)
    rng = np.random.default_rng(seed)
    seen: set[tuple] = set()
    edges, n_signal, n_noise, drawn = [], 0, 0, 0
    batch = 4096
    while drawn < budget and (n_signal < quota_signal or n_noise < quota_noise):
        size = min(batch, budget - drawn)
        trip = np.sort(rng.integers(0, n, size=(size, 3)), axis=1)
        drawn += size
        distinct = (trip[:, 0] != trip[:, 1]) & (trip[:, 1] != trip[:, 2])
        trip = trip[distinct]
        d = _triplet_dissimilarity(ds.points, trip)
        lab = ds.labels[trip]
        signal = (lab[:, 0] == lab[:, 1]) & (lab[:, 1] == lab[:, 2]) & (lab[:, 0] != ds.noise_label)
        for t, ok, sig in zip(map(tuple, trip.tolist()), d**2 < d_max2, signal):
            if not ok or t in seen:
                continue
            if sig and n_signal < quota_signal:
                n_signal += 1
            elif not sig and n_noise < quota_noise:
                n_noise += 1
            else:
                continue
            seen.add(t)
            edges.append(t)
    H = Hypergraph(n, tuple(edges), M=3)
    if n_signal < quota_signal or n_noise < quota_noise:
        raise BudgetExhausted("sampling budget exhausted", n_signal, n_noise)
    isolated = np.ones(n, dtype=bool)
    for e in H.edges:
        isolated[list(e)] = False
    return LineHypergraph(H, ds.labels.copy(), isolated, n_signal, n_noise)
