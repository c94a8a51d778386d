"""ICL model selection over the number of groups."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .hypergraph import Hypergraph
from .model import complete_loglik
from .vem import FitConfig, FitResult, fit


@dataclass(frozen=True)
class IclScore:
    q: int
    variant: str
    loglik_complete: float
    penalty: float

    @property
    def value(self) -> float:
        return self.loglik_complete - self.penalty


def icl_penalty(q: int, n: int, M: int, variant: str) -> float:
    base = 0.5 * (q - 1) * math.log(n)
    logs = {m: math.log(math.comb(n, m)) for m in range(2, M + 1)}
    if variant == "full":
        return base + 0.5 * sum(math.comb(q + m - 1, m) * v for m, v in logs.items())
    if variant == "affm":
        return base + (M - 1) * sum(logs.values())
    if variant == "aff":
        return base + sum(logs.values())
    raise ValueError(f"unknown variant {variant!r}")


def icl(result: FitResult, H: Hypergraph, variant: str | None = None) -> IclScore:
    """Complete-data log-likelihood at the hard labels minus the penalty."""
    variant = variant or result.params.submodel
    ll = complete_loglik(result.params, H, result.labels)
    return IclScore(result.params.Q, variant, ll, icl_penalty(result.params.Q, H.n, result.params.M, variant))


@dataclass
class Selection:
    best_q: int
    fits: dict[int, FitResult]
    scores: dict[int, IclScore]


def _fit_one(args):
    H, q, cfg = args
    return q, fit(H, q, cfg)


def select_q(H: Hypergraph, q_range, cfg: FitConfig | None = None, variant: str | None = None,
             workers: int = 1) -> Selection:
    """Fit every ``q`` in ``q_range`` and keep the ICL maximizer.

    The variant sets both the submodel fitted and the penalty.  Each ``q``
    runs with seed ``cfg.seed + q`` so results do not depend on ``workers``.
    Ties go to the smaller ``q``.
    """
    cfg = cfg or FitConfig()
    qs = sorted(set(int(q) for q in q_range))
    if not qs:
        raise ValueError("empty q range")
    variant = variant or cfg.submodel
    jobs = [
        (H, q, replace(cfg, submodel=variant, seed=None if cfg.seed is None else cfg.seed + q))
        for q in qs
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fits = dict(pool.map(_fit_one, jobs))
    else:
        fits = dict(map(_fit_one, jobs))
    scores = {}
    for q in qs:
        scores[q] = icl(fits[q], H, variant)
        fits[q].icl = {"variant": variant, "loglik": scores[q].loglik_complete,
                       "penalty": scores[q].penalty, "value": scores[q].value}
    best = max(qs, key=lambda q: (scores[q].value, -q))
    return Selection(best, fits, scores)


def icl_table_csv(selection: Selection, precision: int = 6, header=()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["q", "variant", "loglik", "penalty", "icl"])
    for q, s in sorted(selection.scores.items()):
        writer.writerow([q, s.variant, f"{s.loglik_complete:.{precision}g}",
                         f"{s.penalty:.{precision}g}", f"{s.value:.{precision}g}"])
    return out.getvalue()
