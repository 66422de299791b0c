import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import P_CONFLICT, P_SAME, P_SHARED1, Q_ABCD, Q_ACBD, caterpillar
from oracles import adjacency, brute_maximal_cliques, legal_fills_by_exhaustion
from treecompat.chordal import (
    TreeDecomposition,
    Triangulation,
    build_clique_tree,
    is_chordal,
    triangulation_from_decomposition,
    validate_decomposition,
    width,
)
from treecompat.compatibility import brute_force_compatible, random_profile
from treecompat.display_graph import build_display_graph, fill_from_names
from treecompat.errors import InputError, InstanceTooLarge, PreconditionError
from treecompat.legal import (
    bags_containing,
    check_concise,
    check_legal,
    claim1_violations,
    claim2_violations,
    decomposition_from_supertree,
    make_concise,
    property_i_violations,
    property_ii_violations,
    search_legal_triangulation,
    search_with_stats,
)
from treecompat.trees import EmbeddingFunction, Profile, compute_embedding

SAME_FILL = [["u1", "u2"], ["v1", "v2"], ["u1", "v2"]]


def tri_of(g, names):
    return Triangulation(g.graph, fill_from_names(g, names))


def named(g, fill):
    return {frozenset(g.name(v).split(".", 1)[1] for v in e) for e in fill}


def natural_maps(supertree, profile):
    return [compute_embedding(supertree, t) for t in profile]


G_Q = build_display_graph(Profile((Q_ABCD,)))
G_SAME = build_display_graph(P_SAME)
G_SHARED1 = build_display_graph(P_SHARED1)
G_CONFLICT = build_display_graph(P_CONFLICT)


class TestCheckLegal:
    def test_tree_empty_fill(self):
        assert check_legal(G_Q, Triangulation(G_Q.graph)).legal

    def test_same_three_edges(self):
        assert check_legal(G_SAME, tri_of(G_SAME, SAME_FILL)).legal

    def test_same_four_edges_breaks_lt1(self):
        report = check_legal(G_SAME, tri_of(G_SAME, SAME_FILL + [["v1", "u2"]]))
        assert not report.legal and not report.lt2_violations
        cliques = {frozenset(G_SAME.name(v).split(".", 1)[1] for v in c) for c, _ in report.lt1_violations}
        assert frozenset({"u1", "v1", "u2", "v2"}) in cliques

    def test_leaf_endpoint_breaks_lt2(self):
        # still chordal, but two fill edges touch leaf a
        tri = tri_of(G_SAME, SAME_FILL + [["a", "v2"], ["a", "v1"]])
        assert is_chordal(tri.graph)
        report = check_legal(G_SAME, tri)
        assert len(report.lt2_violations) == 2

    def test_same_tree_fill_is_lt2(self):
        g = build_display_graph(Profile((caterpillar(),)))
        tri = tri_of(g, [["u", "x"]])
        assert is_chordal(tri.graph)
        assert check_legal(g, tri).lt2_violations == [tuple(sorted((g.resolve("u"), g.resolve("x"))))]

    def test_non_chordal(self):
        with pytest.raises(PreconditionError):
            check_legal(G_SAME, Triangulation(G_SAME.graph))

    def test_report_json(self):
        data = check_legal(G_SAME, tri_of(G_SAME, SAME_FILL + [["v1", "u2"]])).to_json(G_SAME.name)
        assert data["legal"] is False and data["lt1_violations"]


class TestCheckConcise:
    def test_same(self):
        assert check_concise(G_SAME, tri_of(G_SAME, SAME_FILL))

    def test_shared1_empty_fill(self):
        tri = Triangulation(G_SHARED1.graph)
        assert check_legal(G_SHARED1, tri).legal
        assert not check_concise(G_SHARED1, tri)

    def test_tree(self):
        assert check_concise(G_Q, Triangulation(G_Q.graph))

    def test_illegal_input(self):
        with pytest.raises(PreconditionError):
            check_concise(G_SAME, tri_of(G_SAME, SAME_FILL + [["v1", "u2"]]))


class TestBagsContaining:
    def test_shared_leaf(self):
        ct = build_clique_tree(G_SHARED1.graph)
        assert len(bags_containing(ct, G_SHARED1.leaf_of["a"])) == 2

    def test_u1_in_same(self):
        h = tri_of(G_SAME, SAME_FILL).graph
        ct = build_clique_tree(h)
        u1 = G_SAME.resolve("u1")
        oracle = [c for c in brute_maximal_cliques(adjacency(h.vertices, h.sorted_edges())) if u1 in c]
        assert len(bags_containing(ct, u1)) == len(oracle) == 4

    def test_single_bag(self):
        dec = TreeDecomposition((0,), frozenset(), {0: frozenset(G_SAME.vertices)})
        assert all(len(bags_containing(dec, v)) == 1 for v in G_SAME.vertices)


class TestMakeConcise:
    def test_fixed_point(self):
        ct = build_clique_tree(tri_of(G_SAME, SAME_FILL).graph)
        out = make_concise(G_SAME, ct)
        assert sorted(map(sorted, out.bags.values())) == sorted(map(sorted, ct.bags.values()))

    def test_shared1(self):
        ct = build_clique_tree(G_SHARED1.graph)
        out = make_concise(G_SHARED1, ct)
        assert validate_decomposition(G_SHARED1.graph, out)
        tri = triangulation_from_decomposition(G_SHARED1.graph, out)
        assert named(G_SHARED1, tri.fill) == {frozenset(("u1", "u2"))}
        merged = frozenset(G_SHARED1.resolve(x) for x in ("a", "u1", "u2"))
        assert merged in out.bags.values()
        assert check_legal(G_SHARED1, tri) and check_concise(G_SHARED1, tri)

    def test_step_two_merges_duplicated_internal_edge(self):
        u, v = G_Q.resolve("u"), G_Q.resolve("v")
        a, b, c, d = (G_Q.leaf_of[x] for x in "abcd")
        bags = [frozenset(s) for s in ({a, u}, {b, u}, {u, v}, {u, v}, {v, c}, {v, d})]
        dec = TreeDecomposition(
            tuple(range(6)),
            frozenset(frozenset(e) for e in [(0, 2), (1, 2), (2, 3), (3, 4), (3, 5)]),
            dict(enumerate(bags)),
        )
        assert validate_decomposition(G_Q.graph, dec)
        out = make_concise(G_Q, dec)
        assert len(out.nodes) == 5
        assert len(bags_containing(out, u) & bags_containing(out, v)) == 1
        tri = triangulation_from_decomposition(G_Q.graph, out)
        assert check_concise(G_Q, tri)

    def test_illegal_input(self):
        ct = build_clique_tree(tri_of(G_SAME, SAME_FILL + [["v1", "u2"]]).graph)
        with pytest.raises(PreconditionError):
            make_concise(G_SAME, ct)


class TestForwardConstruction:
    def test_single_tree(self):
        dec = decomposition_from_supertree(G_Q, Q_ABCD, natural_maps(Q_ABCD, Profile((Q_ABCD,))))
        assert validate_decomposition(G_Q.graph, dec)
        assert width(dec) == 1
        assert triangulation_from_decomposition(G_Q.graph, dec).fill == frozenset()

    def test_same(self):
        dec = decomposition_from_supertree(G_SAME, Q_ABCD, natural_maps(Q_ABCD, P_SAME))
        assert validate_decomposition(G_SAME.graph, dec)
        bags = {frozenset(G_SAME.name(x).split(".", 1)[1] for x in b) for b in dec.bags.values()}
        assert frozenset({"u1", "u2", "v1"}) in bags
        assert frozenset({"u2", "v1", "v2"}) in bags
        tri = triangulation_from_decomposition(G_SAME.graph, dec)
        assert named(G_SAME, tri.fill) == {frozenset(p) for p in [("u1", "u2"), ("v1", "v2"), ("u2", "v1")]}
        assert check_legal(G_SAME, tri)
        assert width(dec) <= 2
        assert property_i_violations(G_SAME, dec) == []
        assert property_ii_violations(G_SAME, dec) == []

    def test_conflict_has_no_embedding(self):
        assert compute_embedding(Q_ABCD, Q_ACBD) is None

    def test_bad_embedding_rejected(self):
        phis = natural_maps(Q_ABCD, P_SAME)
        broken = EmbeddingFunction(phis[0].source, phis[0].target, {**phis[0].mapping, "a": "b", "b": "a"})
        with pytest.raises(InputError):
            decomposition_from_supertree(G_SAME, Q_ABCD, [broken, phis[1]])

    def test_wrong_count(self):
        with pytest.raises(InputError):
            decomposition_from_supertree(G_SAME, Q_ABCD, natural_maps(Q_ABCD, P_SAME)[:1])


class TestSearch:
    def test_tree(self):
        tri = search_legal_triangulation(G_Q)
        assert tri is not None and tri.fill == frozenset()

    def test_same(self):
        tri = search_legal_triangulation(G_SAME)
        assert named(G_SAME, tri.fill) == {frozenset(p) for p in [("u1", "u2"), ("v1", "v2"), ("u1", "v2")]}

    def test_same_matches_exhaustive_oracle(self):
        fills = legal_fills_by_exhaustion(G_SAME)
        assert min(map(len, fills)) == 3
        assert set(map(frozenset, fills[0])) == search_legal_triangulation(G_SAME).fill

    def test_conflict(self):
        outcome = search_with_stats(G_CONFLICT, method="enumerate")
        assert outcome.triangulation is None
        assert outcome.examined + outcome.pruned == 16
        assert outcome.summary() == "16/16 fill subsets exhausted"
        assert legal_fills_by_exhaustion(G_CONFLICT) == []

    def test_conflict_elimination(self):
        assert search_with_stats(G_CONFLICT, method="elimination").triangulation is None

    def test_limit(self):
        with pytest.raises(InstanceTooLarge):
            search_legal_triangulation(G_SAME, limit=3)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            search_with_stats(G_SAME, method="guess")


def small_random_graphs(count, seed, k_choices=(2,), n_choices=(4, 5), universe=6, max_candidates=9):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p = random_profile(rng.randrange(10**6), rng.choice(k_choices), rng.choice(n_choices), 0.5, universe)
        g = build_display_graph(p)
        if len(g.candidate_fill_edges()) <= max_candidates:
            out.append(g)
    return out


@pytest.mark.parametrize("g", small_random_graphs(25, 3))
def test_search_is_lexicographic_minimum(g):
    fills = legal_fills_by_exhaustion(g)
    tri = search_legal_triangulation(g, limit=None)
    if not fills:
        assert tri is None
        return
    assert tri is not None
    assert tri.fill == set(map(frozenset, fills[0]))


@pytest.mark.parametrize(
    "g", small_random_graphs(30, 11, k_choices=(2, 3), n_choices=(4, 5), universe=7, max_candidates=12)
)
def test_engines_agree(g):
    a = search_with_stats(g, limit=None, method="enumerate")
    b = search_with_stats(g, limit=None, method="elimination")
    assert (a.triangulation is None) == (b.triangulation is None)
    if a.triangulation is not None:
        assert a.triangulation.fill == b.triangulation.fill


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 4), (2, 5), (3, 4)]))
def test_legal_triangulations_satisfy_claims(seed, shape):
    k, n = shape
    g = build_display_graph(random_profile(seed, k, n, 0.6, 6))
    tri = search_legal_triangulation(g, limit=None)
    if tri is None or not g.graph.is_connected():
        return
    ct = build_clique_tree(tri.graph)
    assert claim1_violations(g, ct) == []
    assert claim2_violations(g, ct) == []
    concise = make_concise(g, ct)
    assert validate_decomposition(g.graph, concise)
    ctri = triangulation_from_decomposition(g.graph, concise)
    assert check_legal(g, ctri) and check_concise(g, ctri)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_forward_construction_on_oracle_witness(seed):
    p = random_profile(seed, 2, 4, 0.75, 5)
    report = brute_force_compatible(p)
    if not report.compatible:
        return
    g = build_display_graph(p)
    dec = decomposition_from_supertree(g, report.witness.supertree, report.witness.embeddings)
    assert validate_decomposition(g.graph, dec)
    assert width(dec) <= len(p)
    assert property_i_violations(g, dec) == []
    assert property_ii_violations(g, dec) == []
    assert check_legal(g, triangulation_from_decomposition(g.graph, dec))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_same_tree_pair_never_legal(seed, rng):
    g = build_display_graph(random_profile(seed, 2, 5, 0.6, 6))
    tri = search_legal_triangulation(g, limit=None)
    base = set(tri.fill) if tri is not None else set()
    inner = sorted(g.internal_vertices())
    same = [(u, v) for u in inner for v in inner if u < v and g.info[u].tree == g.info[v].tree
            and not g.graph.has_edge(u, v)]
    if not same:
        return
    extra = frozenset(rng.choice(same))
    h = Triangulation(g.graph, frozenset(base | {extra}))
    if is_chordal(h.graph):
        assert not check_legal(g, h)
