import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperblock.exceptions import EmptyInput, OutOfRange, ParseError, TooSmall
from hyperblock.hypergraph import (
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
    write_remap_csv,
)


class TestCanonical:
    def test_sorts(self):
        assert canonical_hyperedge([3, 1, 2], 5) == (1, 2, 3)

    def test_dedups_repeated_node(self):
        assert canonical_hyperedge([2, 2, 4], 5) == (2, 4)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            canonical_hyperedge([7], 5)


class TestHypergraph:
    def test_duplicate_edges_collapse(self):
        H = Hypergraph(3, ((0, 1), (1, 0), (0, 1, 2)))
        assert H.edges == ((0, 1), (0, 1, 2))
        assert H.n_duplicates == 1

    def test_edges_of_size(self):
        H = Hypergraph(4, ((0, 1), (2, 3), (0, 2, 3)))
        np.testing.assert_array_equal(H.edges_of_size(2), [[0, 1], [2, 3]])
        assert H.edges_of_size(4).shape == (0, 4)
        assert H.size_counts() == {2: 2, 3: 1}

    def test_subgraph_keeps_internal_edges_only(self):
        H = Hypergraph(5, ((0, 1), (1, 2, 3), (3, 4)))
        sub, kept = H.subgraph([1, 2, 3])
        assert sub.edges == ((0, 1, 2),)
        np.testing.assert_array_equal(kept, [1, 2, 3])


class TestDerived:
    @pytest.mark.parametrize(
        "n, edges, expected",
        [
            (3, ((0, 1), (0, 1, 2)), [2, 2, 1]),
            (4, (), [0, 0, 0, 0]),
            (4, ((0, 1), (2, 3), (0, 2, 3)), [2, 1, 2, 2]),
        ],
    )
    def test_degree_sequence(self, n, edges, expected):
        np.testing.assert_array_equal(degree_sequence(Hypergraph(n, edges)), expected)

    def test_size2_adjacency_ignores_larger_edges(self):
        A = size2_adjacency(Hypergraph(3, ((0, 1), (0, 1, 2))))
        expected = np.zeros((3, 3))
        expected[0, 1] = expected[1, 0] = 1
        np.testing.assert_array_equal(A, expected)

    def test_size2_adjacency_path(self):
        A = size2_adjacency(Hypergraph(3, ((0, 1), (1, 2))))
        np.testing.assert_array_equal(A, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])

    def test_size2_adjacency_empty(self):
        assert not size2_adjacency(Hypergraph(3, ((0, 1, 2),))).any()


class TestLargestComponent:
    def test_connected_is_identity(self):
        H = Hypergraph(3, ((0, 1), (1, 2)))
        sub, ids = largest_component(H)
        assert sub.edges == H.edges
        np.testing.assert_array_equal(ids, [0, 1, 2])

    def test_picks_larger_component(self):
        sub, ids = largest_component(Hypergraph(5, ((0, 1), (2, 3, 4))))
        assert sub.n == 3 and sub.edges == ((0, 1, 2),)
        np.testing.assert_array_equal(ids, [2, 3, 4])

    def test_isolated_nodes_excluded(self):
        sub, ids = largest_component(Hypergraph(6, ((0, 1),)))
        np.testing.assert_array_equal(ids, [0, 1])

    def test_tie_goes_to_smallest_id(self):
        _, ids = largest_component(Hypergraph(4, ((2, 3), (0, 1))))
        np.testing.assert_array_equal(ids, [0, 1])


class TestTextFormat:
    def test_parse_basic(self):
        H, ext = parse_hyperedge_text("0 1\n0 1 2\n")
        assert H.n == 3 and H.edges == ((0, 1), (0, 1, 2))
        np.testing.assert_array_equal(ext, [0, 1, 2])

    def test_parse_comment_and_compaction(self):
        H, ext = parse_hyperedge_text("# comment\n5 3\n")
        assert H.edges == ((0, 1),)
        np.testing.assert_array_equal(ext, [3, 5])
        H, _ = parse_hyperedge_text("5 3\n", compact=False)
        assert H.n == 6 and H.edges == ((3, 5),)

    def test_parse_duplicate_line(self):
        H, _ = parse_hyperedge_text("0 1\n0 1\n")
        assert H.edges == ((0, 1),)

    def test_parse_tabs_and_blank_lines(self):
        H, _ = parse_hyperedge_text("\n0\t1\t2\n\n")
        assert H.edges == ((0, 1, 2),)

    @pytest.mark.parametrize("text, error", [("0 x\n", ParseError), ("0 -1\n", ParseError), ("4 4\n", TooSmall)])
    def test_parse_errors(self, text, error):
        with pytest.raises(error):
            parse_hyperedge_text(text)

    def test_parse_error_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_hyperedge_text("0 1\n\n1 y\n")
        assert info.value.line == 3

    def test_remap_csv(self):
        assert write_remap_csv([3, 5]).splitlines() == ["external_id,internal_id", "3,0", "5,1"]

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.sets(st.integers(0, 9), min_size=2, max_size=4), max_size=15))
    def test_roundtrip(self, edge_sets):
        H = Hypergraph(10, tuple(tuple(e) for e in edge_sets))
        back, _ = parse_hyperedge_text(write_hyperedge_text(H, ["header"]), compact=False)
        assert back.edge_set == H.edge_set

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.sets(st.integers(0, 7), min_size=2, max_size=5), max_size=12))
    def test_degree_sum(self, edge_sets):
        H = Hypergraph(8, tuple(tuple(e) for e in edge_sets))
        assert degree_sequence(H).sum() == sum(len(e) for e in H.edges)


class TestIngest:
    def test_duplicate_papers_collapse(self):
        H, authors, report = ingest_bipartite(
            [BipartiteRecord("P1", ("a", "b")), BipartiteRecord("P2", ("a", "b"))], 4)
        assert H.edges == ((0, 1),) and report.n_duplicate_sets == 1

    def test_large_and_single_author_papers_dropped(self):
        records = [BipartiteRecord("P1", tuple("abcde")), BipartiteRecord("P2", ("a",)),
                   BipartiteRecord("P3", ("c", "d"))]
        H, authors, report = ingest_bipartite(records, 4)
        assert list(authors) == ["c", "d"]
        assert (report.n_too_large, report.n_single_author) == (1, 1)

    def test_record_requires_authors(self):
        with pytest.raises(EmptyInput):
            BipartiteRecord("P", ())

    def test_read_csv(self):
        records = read_bipartite_csv("paper,author\nP1,a\nP1,b\nP2,b\n")
        assert [(r.paper_id, r.author_ids) for r in records] == [("P1", ("a", "b")), ("P2", ("b",))]

    def test_read_csv_bad_header(self):
        with pytest.raises(ParseError):
            read_bipartite_csv("x,y\n1,2\n")

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=6), min_size=1, max_size=12),
           st.integers(2, 5))
    def test_edges_respect_cap_and_are_unique(self, papers, cap):
        records = [BipartiteRecord(f"P{i}", tuple(a)) for i, a in enumerate(papers)]
        H, _, _ = ingest_bipartite(records, cap)
        assert all(2 <= len(e) <= cap for e in H.edges)
        assert len(set(H.edges)) == len(H.edges)
