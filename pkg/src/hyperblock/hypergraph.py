"""Simple hypergraphs: canonical storage, derived structures and file I/O."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import EmptyInput, OutOfRange, ParseError, TooSmall

logger = logging.getLogger(__name__)


def canonical_hyperedge(nodes: Iterable[int], n: int) -> tuple[int, ...]:
    """Sort and deduplicate ``nodes``; reject out-of-range ids and self-loops.

    >>> canonical_hyperedge([3, 1, 2], 5)
    (1, 2, 3)
    >>> canonical_hyperedge([2, 2, 4], 5)
    (2, 4)
    """
    edge = tuple(sorted({int(v) for v in nodes}))
    for v in edge:
        if v < 0 or v >= n:
            raise OutOfRange(f"node id {v} outside 0..{n - 1}")
    if len(edge) < 2:
        raise TooSmall(f"hyperedge {tuple(nodes)} has fewer than 2 distinct nodes")
    return edge


@dataclass(frozen=True)
class Hypergraph:
    """Node count plus a lexicographically sorted set of simple hyperedges.

    Edges are canonicalized on construction; duplicates are collapsed and
    counted in ``n_duplicates``.  ``M`` defaults to the largest edge size
    present (at least 2) and may be set higher to model absent sizes.
    """

    n: int
    edges: tuple[tuple[int, ...], ...] = ()
    M: int | None = None
    n_duplicates: int = field(default=0, compare=False)

    def __post_init__(self):
        canon = [canonical_hyperedge(e, self.n) for e in self.edges]
        unique = sorted(set(canon))
        dup = len(canon) - len(unique) + self.n_duplicates
        if dup:
            logger.warning("collapsed %d duplicate hyperedge(s)", dup)
        largest = max((len(e) for e in unique), default=2)
        M = largest if self.M is None else int(self.M)
        if M < largest:
            raise ValueError(f"M={M} smaller than the largest hyperedge ({largest})")
        object.__setattr__(self, "edges", tuple(unique))
        object.__setattr__(self, "M", max(M, 2))
        object.__setattr__(self, "n_duplicates", dup)

    def __len__(self):
        return len(self.edges)

    @cached_property
    def _by_size(self):
        out = {}
        for m in range(2, self.M + 1):
            rows = [e for e in self.edges if len(e) == m]
            out[m] = np.array(rows, dtype=np.int64).reshape(len(rows), m)
            out[m].setflags(write=False)
        return out

    def edges_of_size(self, m: int) -> np.ndarray:
        """Hyperedges of size ``m`` as an ``(E_m, m)`` int array."""
        if m not in self._by_size:
            return np.zeros((0, m), dtype=np.int64)
        return self._by_size[m]

    def size_counts(self) -> dict[int, int]:
        return {m: len(self.edges_of_size(m)) for m in range(2, self.M + 1)}

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def subgraph(self, nodes: Sequence[int]) -> tuple["Hypergraph", np.ndarray]:
        """Induced sub-hypergraph on ``nodes`` (relabelled in ascending order).

        Returns the new hypergraph and the sorted array of original ids.
        """
        keep = np.array(sorted(set(int(v) for v in nodes)), dtype=np.int64)
        remap = {int(v): i for i, v in enumerate(keep)}
        edges = [tuple(remap[v] for v in e) for e in self.edges if all(v in remap for v in e)]
        return Hypergraph(len(keep), tuple(edges), M=self.M), keep


def degree_sequence(H: Hypergraph) -> np.ndarray:
    """Number of hyperedges containing each node."""
    deg = np.zeros(H.n, dtype=np.int64)
    for e in H.edges:
        deg[list(e)] += 1
    return deg


def size2_adjacency(H: Hypergraph) -> np.ndarray:
    """Dense 0/1 adjacency of the size-2 slice; larger hyperedges are ignored."""
    A = np.zeros((H.n, H.n), dtype=np.float64)
    pairs = H.edges_of_size(2)
    A[pairs[:, 0], pairs[:, 1]] = 1.0
    A[pairs[:, 1], pairs[:, 0]] = 1.0
    return A


def _incidence(H: Hypergraph) -> csr_matrix:
    rows = [i for i, e in enumerate(H.edges) for _ in e]
    cols = [v for e in H.edges for v in e]
    return csr_matrix(
        (np.ones(len(cols)), (rows, cols)), shape=(len(H.edges), H.n)
    )


def largest_component(H: Hypergraph) -> tuple[Hypergraph, np.ndarray]:
    """Largest connected component under shared-node incidence.

    Isolated nodes are singleton components.  Ties between equal-sized
    components go to the one holding the smallest original id.  Returns the
    relabelled component and the array of original ids (position = new id).
    """
    if H.n == 0:
        return H, np.zeros(0, dtype=np.int64)
    inc = _incidence(H)
    adj = (inc.T @ inc).tocsr()
    _, comp = connected_components(adj, directed=False)
    sizes = np.bincount(comp)
    first = np.full(len(sizes), H.n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(H.n))
    # largest size first, then smallest contained id
    best = min(range(len(sizes)), key=lambda c: (-sizes[c], first[c]))
    return H.subgraph(np.flatnonzero(comp == best))


def parse_hyperedge_text(text: str, compact: bool = True):
    """Parse the one-hyperedge-per-line text format.

    Ids are arbitrary non-negative integers.  With ``compact=True`` the
    distinct ids are mapped to ``0..n-1`` in ascending order; otherwise
    ``n = max id + 1``.  Returns ``(H, external_ids)`` where
    ``external_ids[internal] = external``.
    """
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            ids = [int(tok) for tok in stripped.split()]
        except ValueError as exc:
            raise ParseError(f"non-integer token in {stripped!r}", lineno) from exc
        if any(v < 0 for v in ids):
            raise ParseError("negative node id", lineno)
        if len(set(ids)) < 2:
            raise TooSmall(f"line {lineno}: fewer than 2 distinct nodes")
        raw.append(ids)
    ids_seen = sorted({v for ids in raw for v in ids})
    if compact:
        remap = {v: i for i, v in enumerate(ids_seen)}
        external = np.array(ids_seen, dtype=np.int64)
    else:
        size = ids_seen[-1] + 1 if ids_seen else 0
        remap = {v: v for v in ids_seen}
        external = np.arange(size, dtype=np.int64)
    edges = [tuple(remap[v] for v in ids) for ids in raw]
    return Hypergraph(len(external), tuple(edges)), external


def write_hyperedge_text(H: Hypergraph, header: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    for e in H.edges:
        out.write(" ".join(str(v) for v in e) + "\n")
    return out.getvalue()


def write_remap_csv(external_ids: Sequence, header: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["external_id", "internal_id"])
    for internal, external in enumerate(external_ids):
        writer.writerow([external, internal])
    return out.getvalue()


@dataclass(frozen=True)
class BipartiteRecord:
    paper_id: str
    author_ids: tuple[str, ...]

    def __post_init__(self):
        if not self.author_ids:
            raise EmptyInput(f"paper {self.paper_id!r} has no authors")


@dataclass
class IngestReport:
    """Counts of papers dropped or collapsed during bipartite ingestion."""

    n_papers: int = 0
    n_too_large: int = 0
    n_single_author: int = 0
    n_duplicate_sets: int = 0
    n_authors_seen: int = 0


def read_bipartite_csv(text: str) -> list[BipartiteRecord]:
    """Read ``paper,author`` incidence rows into one record per paper."""
    lines = [l for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"paper", "author"} <= set(reader.fieldnames):
        raise ParseError("expected header 'paper,author'", 1)
    papers: dict[str, list[str]] = {}
    for row in reader:
        papers.setdefault(row["paper"].strip(), []).append(row["author"].strip())
    return [BipartiteRecord(p, tuple(a)) for p, a in papers.items()]


def ingest_bipartite(records: Sequence[BipartiteRecord], m_cap: int):
    """Turn author/paper incidences into a simple co-authorship hypergraph.

    Authors become nodes, numbered in order of first appearance among the
    papers that survive.  Each paper contributes its distinct author set;
    sets larger than ``m_cap`` or with a single author are dropped, and
    repeated sets are collapsed.  Returns ``(H, author_ids, report)``.
    """
    if m_cap < 2:
        raise ValueError("m_cap must be at least 2")
    if not records:
        raise EmptyInput("no bipartite records")
    report = IngestReport(n_papers=len(records))
    authors: dict[str, int] = {}
    seen: set[frozenset] = set()
    edges = []
    for rec in records:
        group = list(dict.fromkeys(rec.author_ids))
        if len(group) > m_cap:
            report.n_too_large += 1
            continue
        if len(group) < 2:
            report.n_single_author += 1
            continue
        key = frozenset(group)
        if key in seen:
            report.n_duplicate_sets += 1
            continue
        seen.add(key)
        for a in group:
            authors.setdefault(a, len(authors))
        edges.append(tuple(authors[a] for a in group))
    report.n_authors_seen = len({a for rec in records for a in rec.author_ids})
    H = Hypergraph(len(authors), tuple(edges), M=m_cap)
    return H, list(authors), report
