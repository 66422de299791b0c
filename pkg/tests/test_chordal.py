import pytest
from hypothesis import given, settings

from instances import P_SAME, Q_ABCD, small_graphs
from oracles import adjacency, brute_maximal_cliques, naive_is_chordal
from treecompat.chordal import (
    Graph,
    TreeDecomposition,
    build_clique_tree,
    is_chordal,
    is_clique_tree,
    is_perfect_elimination_order,
    maximal_cliques,
    mcs_order,
    triangulation_from_decomposition,
    validate_decomposition,
    width,
)
from treecompat.display_graph import build_display_graph, fill_from_names
from treecompat.errors import PreconditionError
from treecompat.trees import Profile

TRIANGLE = Graph.from_edges([("x", "y"), ("y", "z"), ("x", "z")])
SQUARE = Graph.from_edges([("w", "x"), ("x", "y"), ("y", "z"), ("z", "w")])
SAME_FILL = [["u1", "u2"], ["v1", "v2"], ["u1", "v2"]]


def same_triangulated():
    g = build_display_graph(P_SAME)
    return g, g.graph.with_edges(tuple(e) for e in fill_from_names(g, SAME_FILL))


def by_name(g, sets):
    return {frozenset(g.name(v).split(".", 1)[1] for v in s) for s in sets}


def td(bags, edges):
    return TreeDecomposition(tuple(range(len(bags))), frozenset(frozenset(e) for e in edges), dict(enumerate(bags)))


class TestIsChordal:
    def test_triangle(self):
        assert is_chordal(TRIANGLE)

    def test_square(self):
        assert not is_chordal(SQUARE)

    def test_oracle_sanity(self):
        assert not naive_is_chordal(adjacency("wxyz", [("w", "x"), ("x", "y"), ("y", "z"), ("z", "w")]))
        assert naive_is_chordal(adjacency("xyz", [("x", "y"), ("y", "z"), ("x", "z")]))

    def test_same_with_fill(self):
        _, h = same_triangulated()
        assert is_chordal(h)
        assert naive_is_chordal(adjacency(h.vertices, h.sorted_edges()))

    def test_same_without_fill(self):
        g = build_display_graph(P_SAME)
        assert not is_chordal(g.graph)

    @settings(max_examples=300, deadline=None)
    @given(small_graphs())
    def test_agrees_with_induced_cycle_oracle(self, graph):
        n, edges = graph
        h = Graph.from_edges(edges, range(n))
        assert is_chordal(h) == naive_is_chordal(adjacency(n, edges))

    @settings(max_examples=100, deadline=None)
    @given(small_graphs())
    def test_mcs_order_is_peo_exactly_when_chordal(self, graph):
        n, edges = graph
        h = Graph.from_edges(edges, range(n))
        order = mcs_order(h)
        assert sorted(order) == list(range(n))
        assert is_perfect_elimination_order(h, order) == naive_is_chordal(adjacency(n, edges))


class TestMaximalCliques:
    def test_single_edge(self):
        assert maximal_cliques(Graph.from_edges([("x", "y")])) == [frozenset("xy")]

    def test_tree_gives_edges(self):
        g = build_display_graph(Profile((Q_ABCD,)))
        assert set(maximal_cliques(g.graph)) == set(g.graph.edges)

    def test_same_triangulated(self):
        g, h = same_triangulated()
        expected = {
            frozenset(s)
            for s in [("a", "u1", "u2"), ("b", "u1", "u2"), ("c", "v1", "v2"), ("d", "v1", "v2"),
                      ("u1", "u2", "v2"), ("u1", "v1", "v2")]
        }
        assert by_name(g, maximal_cliques(h)) == expected
        assert set(maximal_cliques(h)) == brute_maximal_cliques(adjacency(h.vertices, h.sorted_edges()))

    def test_not_chordal(self):
        with pytest.raises(PreconditionError):
            maximal_cliques(SQUARE)

    @settings(max_examples=150, deadline=None)
    @given(small_graphs())
    def test_agrees_with_brute_force(self, graph):
        n, edges = graph
        h = Graph.from_edges(edges, range(n))
        if is_chordal(h):
            assert set(maximal_cliques(h)) == brute_maximal_cliques(adjacency(n, edges))


class TestCliqueTree:
    def test_triangle(self):
        ct = build_clique_tree(TRIANGLE)
        assert list(ct.bags.values()) == [frozenset("xyz")]

    def test_quartet(self):
        g = build_display_graph(Profile((Q_ABCD,)))
        ct = build_clique_tree(g.graph)
        assert len(ct.nodes) == 5
        assert validate_decomposition(g.graph, ct)
        for x, y in ct.sorted_tree_edges():
            assert ct.bags[x] & ct.bags[y]

    def test_same_triangulated(self):
        g, h = same_triangulated()
        ct = build_clique_tree(h)
        assert len(ct.nodes) == 6
        assert is_clique_tree(h, ct)
        name_of = {x: frozenset(g.name(v).split(".", 1)[1] for v in ct.bags[x]) for x in ct.nodes}
        x = next(n for n, b in name_of.items() if b == {"u1", "u2", "v2"})
        y = next(n for n, b in name_of.items() if b == {"u1", "v1", "v2"})
        assert frozenset((x, y)) in ct.tree_edges
        assert by_name(g, [ct.bags[x] & ct.bags[y]]) == {frozenset(("u1", "v2"))}

    def test_rejects_disconnected(self):
        with pytest.raises(PreconditionError):
            build_clique_tree(Graph.from_edges([("a", "b"), ("c", "d")]))

    def test_rejects_non_chordal(self):
        with pytest.raises(PreconditionError):
            build_clique_tree(SQUARE)

    @settings(max_examples=300, deadline=None)
    @given(small_graphs())
    def test_valid_and_bijective(self, graph):
        n, edges = graph
        h = Graph.from_edges(edges, range(n))
        if not (h.is_connected() and is_chordal(h)):
            return
        ct = build_clique_tree(h)
        assert validate_decomposition(h, ct)
        assert set(ct.bags.values()) == brute_maximal_cliques(adjacency(n, edges))
        assert len(set(ct.bags.values())) == len(ct.nodes)
        # a clique tree of a connected chordal graph: sum |C| - sum |sep| = |V|
        total = sum(len(b) for b in ct.bags.values())
        seps = sum(len(ct.bags[x] & ct.bags[y]) for x, y in ct.sorted_tree_edges())
        assert total - seps == n

    def test_json_round_trip(self):
        g, h = same_triangulated()
        ct = build_clique_tree(h)
        again = TreeDecomposition.from_json(ct.to_json(g.name), g.resolve)
        assert again.bags == dict(ct.bags) and again.tree_edges == ct.tree_edges


class TestValidate:
    def test_single_bag(self):
        assert validate_decomposition(SQUARE, td([frozenset("wxyz")], []))

    def test_td2(self):
        report = validate_decomposition(TRIANGLE, td([frozenset("xy"), frozenset("yz")], [(0, 1)]))
        assert report.td2 == [("x", "z")]
        assert not report.td1 and not report.td3

    def test_td3(self):
        g = Graph.from_edges([("x", "y")], "xyz")
        report = validate_decomposition(g, td([frozenset("xy"), frozenset("z"), frozenset("x")], [(0, 1), (1, 2)]))
        assert report.td3 == ["x"]

    def test_td1(self):
        report = validate_decomposition(TRIANGLE, td([frozenset("xy")], []))
        assert report.td1 == ["z"]

    def test_not_a_tree(self):
        report = validate_decomposition(TRIANGLE, td([frozenset("xyz"), frozenset("x")], []))
        assert report.tree


class TestTriangulationFromDecomposition:
    def test_clique_tree_has_empty_fill(self):
        _, h = same_triangulated()
        assert triangulation_from_decomposition(h, build_clique_tree(h)).fill == frozenset()

    def test_single_bag_square(self):
        tri = triangulation_from_decomposition(SQUARE, td([frozenset("wxyz")], []))
        assert tri.fill == {frozenset("wy"), frozenset("xz")}

    def test_invalid_decomposition(self):
        with pytest.raises(PreconditionError):
            triangulation_from_decomposition(TRIANGLE, td([frozenset("xy")], []))


class TestWidth:
    def test_single_bag(self):
        assert width(td([frozenset("xyz")], [])) == 2

    def test_tree(self):
        g = build_display_graph(Profile((Q_ABCD,)))
        assert width(build_clique_tree(g.graph)) == 1


@settings(max_examples=100, deadline=None)
@given(small_graphs())
def test_networkx_cross_check(graph):
    nx = pytest.importorskip("networkx")
    n, edges = graph
    h = Graph.from_edges(edges, range(n))
    ref = nx.Graph()
    ref.add_nodes_from(range(n))
    ref.add_edges_from(edges)
    assert is_chordal(h) == nx.is_chordal(ref)
    if nx.is_chordal(ref):
        assert set(maximal_cliques(h)) == {frozenset(c) for c in nx.chordal_graph_cliques(ref)}
