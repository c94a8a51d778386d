"""Simple-hypergraph stochastic blockmodel: sampling, variational EM and ICL selection."""

from .exceptions import *  # noqa: F401,F403
from .hypergraph import (
    BipartiteRecord,
    Hypergraph,
    canonical_hyperedge,
    degree_sequence,
    ingest_bipartite,
    largest_component,
    parse_hyperedge_text,
    read_bipartite_csv,
    size2_adjacency,
    write_hyperedge_text,
)
from .metrics import ari, ks_thresholds, msre
from .model import HsbmParams, complete_loglik, exact_loglik_small, get_prob, sample_hsbm
from .selection import IclScore, Selection, icl, icl_penalty, select_q
from .simplex import multiset_count, multiset_rank, multiset_unrank
from .spectral import absolute_spectral_init, hyper_laplacian_embedding, kmeans, soft_kmeans
from .sums import leave_one_out, tuple_sum_factorized, tuple_sum_naive
from .synth import (
    LineDataset,
    Scenario,
    build_line_hypergraph,
    gen_line_points,
    line_dissimilarity,
    make_scenario,
    scenario_model,
    scenario_params,
)
from .vem import FitConfig, FitResult, elbo, fit, init_random, m_step, run_vem, ve_fixed_point

__version__ = "0.1.0"
