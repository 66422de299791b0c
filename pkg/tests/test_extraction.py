import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import P_SAME, P_SHARED1, Q_ABCD, star
from treecompat.chordal import Triangulation, build_clique_tree, triangulation_from_decomposition
from treecompat.compatibility import random_profile
from treecompat.display_graph import build_display_graph, fill_from_names
from treecompat.errors import PreconditionError
from treecompat.extraction import extract_supertree, normalize_supertree
from treecompat.legal import make_concise, search_legal_triangulation
from treecompat.trees import PhyloTree, Profile, displays, isomorphic, verify_embedding

SAME_FILL = [["u1", "u2"], ["v1", "v2"], ["u1", "v2"]]


def check_result(g, result):
    assert result.supertree.leaf_labels == g.profile.labels
    for phi, tree in zip(result.embeddings, g.profile):
        assert phi.source == result.raw_tree
        assert verify_embedding(phi)
        assert displays(result.supertree, tree)


class TestExtract:
    def test_single_quartet(self):
        g = build_display_graph(Profile((Q_ABCD,)))
        result = extract_supertree(g, build_clique_tree(g.graph))
        check_result(g, result)
        assert isomorphic(result.supertree, Q_ABCD)

    def test_same(self):
        g = build_display_graph(P_SAME)
        tri = Triangulation(g.graph, fill_from_names(g, SAME_FILL))
        result = extract_supertree(g, build_clique_tree(tri.graph))
        check_result(g, result)
        assert isomorphic(result.supertree, Q_ABCD)

    def test_shared1_after_make_concise(self):
        g = build_display_graph(P_SHARED1)
        concise = make_concise(g, build_clique_tree(g.graph))
        tri = triangulation_from_decomposition(g.graph, concise)
        result = extract_supertree(g, build_clique_tree(tri.graph))
        check_result(g, result)
        assert result.supertree.leaf_labels == frozenset("abcde")

    def test_rejects_non_concise(self):
        g = build_display_graph(P_SHARED1)
        with pytest.raises(PreconditionError):
            extract_supertree(g, build_clique_tree(g.graph))

    def test_rejects_illegal(self):
        g = build_display_graph(P_SAME)
        tri = Triangulation(g.graph, fill_from_names(g, SAME_FILL + [["v1", "u2"]]))
        with pytest.raises(PreconditionError):
            extract_supertree(g, build_clique_tree(tri.graph))

    def test_deterministic(self):
        g = build_display_graph(P_SAME)
        ct = build_clique_tree(Triangulation(g.graph, fill_from_names(g, SAME_FILL)).graph)
        assert extract_supertree(g, ct) == extract_supertree(g, ct)


class TestNormalize:
    def test_dangling_chain_removed(self):
        edges = [("a", "u"), ("b", "u"), ("c", "u"), ("u", "p"), ("p", "q")]
        raw = PhyloTree.from_edges(edges, {t: t for t in "abc"})
        out = normalize_supertree(raw)
        assert isomorphic(out, star("a", "b", "c"))
        assert len(out.vertices) == 4

    def test_normal_tree_unchanged(self):
        assert normalize_supertree(Q_ABCD) == Q_ABCD

    def test_pipeline_output_pruned(self):
        g = build_display_graph(Profile((Q_ABCD,)))
        result = extract_supertree(g, build_clique_tree(g.graph))
        assert len(result.raw_tree.vertices) > 6
        assert len(result.supertree.vertices) == 6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 4, 6), (2, 5, 6), (3, 4, 6), (2, 6, 7)]))
def test_every_concise_legal_triangulation_extracts(seed, shape):
    k, n, universe = shape
    g = build_display_graph(random_profile(seed, k, n, 0.5, universe))
    if not g.graph.is_connected():
        return
    tri = search_legal_triangulation(g, limit=None)
    if tri is None:
        return
    concise = make_concise(g, build_clique_tree(tri.graph))
    ctri = triangulation_from_decomposition(g.graph, concise)
    check_result(g, extract_supertree(g, build_clique_tree(ctri.graph)))
