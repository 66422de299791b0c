"""Chordal graphs, clique trees and tree decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

from .errors import PreconditionError

Vertex = Hashable


def pair(u: Vertex, v: Vertex) -> tuple:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph. Vertices must be mutually orderable."""

    vertices: tuple
    edges: frozenset[frozenset] = frozenset()

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise ValueError(f"bad edge {tuple(e)}")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable | None = None) -> Graph:
        edges = [tuple(e) for e in edges]
        vs = set(vertices) if vertices is not None else set()
        for u, v in edges:
            vs.update((u, v))
        return cls(tuple(sorted(vs)), frozenset(frozenset(e) for e in edges))

    @cached_property
    def adjacency(self) -> dict[Vertex, frozenset]:
        nbrs: dict[Vertex, set] = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(ns) for v, ns in nbrs.items()}

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return v in self.adjacency[u]

    def sorted_edges(self) -> list[tuple]:
        return sorted(pair(*e) for e in self.edges)

    def with_edges(self, extra: Iterable[tuple]) -> Graph:
        return Graph(self.vertices, self.edges | {frozenset(e) for e in extra})

    def components(self) -> list[tuple]:
        seen: set = set()
        out = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            for v in comp:
                for w in self.adjacency[v]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
            out.append(tuple(sorted(comp)))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


# ---------------------------------------------------------------------------
# recognition


def mcs_order(graph: Graph) -> list:
    """Maximum cardinality search; returns an elimination order (reverse visit order).

    Ties go to the smallest vertex so the order is deterministic.
    """
    weight = {v: 0 for v in graph.vertices}
    visited: list = []
    unvisited = set(graph.vertices)
    while unvisited:
        best = max(unvisited, key=lambda v: (weight[v], _neg(v)))
        unvisited.remove(best)
        visited.append(best)
        for w in graph.adjacency[best]:
            if w in unvisited:
                weight[w] += 1
    return visited[::-1]


class _neg:
    """Order-reversing wrapper so ``max`` picks the smallest vertex on ties."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return other.v < self.v

    def __eq__(self, other):
        return self.v == other.v


def is_perfect_elimination_order(graph: Graph, order: list) -> bool:
    pos = {v: i for i, v in enumerate(order)}
    adj = graph.adjacency
    for v in order:
        later = [w for w in adj[v] if pos[w] > pos[v]]
        if not later:
            continue
        parent = min(later, key=pos.__getitem__)
        for w in later:
            if w != parent and w not in adj[parent]:
                return False
    return True


def is_chordal(graph: Graph) -> bool:
    return is_perfect_elimination_order(graph, mcs_order(graph))


def maximal_cliques(graph: Graph) -> list[frozenset]:
    """All maximal cliques of a chordal graph, sorted by their sorted member tuples."""
    order = mcs_order(graph)
    if not is_perfect_elimination_order(graph, order):
        raise PreconditionError("maximal_cliques needs a chordal graph")
    pos = {v: i for i, v in enumerate(order)}
    adj = graph.adjacency
    candidates = {
        frozenset([v, *(w for w in adj[v] if pos[w] > pos[v])]) for v in order
    }
    cliques = [c for c in candidates if not any(c < d for d in candidates)]
    return sorted(cliques, key=lambda c: sorted(c))


# ---------------------------------------------------------------------------
# tree decompositions


@dataclass(frozen=True)
class TreeDecomposition:
    """A tree over integer node ids with a bag of graph vertices per node."""

    nodes: tuple[int, ...]
    tree_edges: frozenset[frozenset[int]]
    bags: Mapping[int, frozenset] = field(default_factory=dict)

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, list[int]] = {x: [] for x in self.nodes}
        for e in self.tree_edges:
            x, y = tuple(e)
            nbrs[x].append(y)
            nbrs[y].append(x)
        return {x: tuple(sorted(ns)) for x, ns in nbrs.items()}

    def sorted_tree_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.tree_edges)

    def nodes_containing(self, v: Vertex) -> frozenset[int]:
        return frozenset(x for x in self.nodes if v in self.bags[x])

    def contract(self, x: int, y: int) -> tuple[TreeDecomposition, int]:
        """Merge adjacent nodes into a fresh node whose bag is the union."""
        if frozenset((x, y)) not in self.tree_edges:
            raise PreconditionError(f"nodes {x} and {y} are not adjacent")
        z = max(self.nodes) + 1
        edges = set()
        for e in self.tree_edges:
            if e == {x, y}:
                continue
            edges.add(frozenset(z if n in (x, y) else n for n in e))
        nodes = tuple(n for n in self.nodes if n not in (x, y)) + (z,)
        bags = {n: b for n, b in self.bags.items() if n not in (x, y)}
        bags[z] = self.bags[x] | self.bags[y]
        return type(self)(nodes, frozenset(edges), bags), z

    def to_json(self, name=str) -> dict:
        return {
            "nodes": [{"id": x, "bag": sorted((name(v) for v in self.bags[x]))} for x in self.nodes],
            "edges": [list(e) for e in self.sorted_tree_edges()],
        }

    @classmethod
    def from_json(cls, data: Mapping, resolve=lambda v: v) -> TreeDecomposition:
        nodes = tuple(int(n["id"]) for n in data["nodes"])
        bags = {int(n["id"]): frozenset(resolve(v) for v in n["bag"]) for n in data["nodes"]}
        edges = frozenset(frozenset(int(x) for x in e) for e in data["edges"])
        return cls(nodes, edges, bags)


class CliqueTree(TreeDecomposition):
    """A tree decomposition whose bags are exactly the maximal cliques."""


@dataclass
class DecompositionReport:
    tree: list[str] = field(default_factory=list)
    td1: list = field(default_factory=list)
    td2: list = field(default_factory=list)
    td3: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not (self.tree or self.td1 or self.td2 or self.td3)

    def __bool__(self) -> bool:
        return self.valid


def _connected_in_tree(dec: TreeDecomposition, members: frozenset[int]) -> bool:
    if not members:
        return True
    start = min(members)
    seen = {start}
    stack = [start]
    while stack:
        for y in dec.adjacency[stack.pop()]:
            if y in members and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == members


def validate_decomposition(graph: Graph, dec: TreeDecomposition) -> DecompositionReport:
    """Check vertex coverage (TD1), edge coverage (TD2) and coherence (TD3)."""
    report = DecompositionReport()
    if not dec.nodes:
        report.tree.append("decomposition has no nodes")
        return report
    if len(dec.tree_edges) != len(dec.nodes) - 1 or not _connected_in_tree(dec, frozenset(dec.nodes)):
        report.tree.append("decomposition structure is not a tree")
    if set(dec.bags) != set(dec.nodes):
        report.tree.append("bags do not match the node set")
        return report
    covered = frozenset().union(*dec.bags.values())
    report.td1 = [v for v in graph.vertices if v not in covered]
    for u, v in graph.sorted_edges():
        if not any(u in b and v in b for b in dec.bags.values()):
            report.td2.append((u, v))
    for v in graph.vertices:
        where = dec.nodes_containing(v)
        if where and not _connected_in_tree(dec, where):
            report.td3.append(v)
    return report


def build_clique_tree(graph: Graph) -> CliqueTree:
    """Maximum-weight spanning tree of the clique intersection graph (Kruskal).

    Cliques are numbered in sorted order; weight ties go to the smaller pair of
    clique numbers.
    """
    if not graph.is_connected():
        raise PreconditionError("clique trees are built for connected graphs only")
    cliques = maximal_cliques(graph)
    n = len(cliques)
    candidates = []
    for i in range(n):
        for j in range(i + 1, n):
            w = len(cliques[i] & cliques[j])
            if w:
                candidates.append((-w, i, j))
    candidates.sort()
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = set()
    for _, i, j in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
            edges.add(frozenset((i, j)))
    return CliqueTree(tuple(range(n)), frozenset(edges), dict(enumerate(cliques)))


def is_clique_tree(graph: Graph, dec: TreeDecomposition) -> bool:
    if not validate_decomposition(graph, dec):
        return False
    bags = sorted((frozenset(b) for b in dec.bags.values()), key=lambda c: sorted(c))
    return bags == maximal_cliques(graph)


@dataclass(frozen=True)
class Triangulation:
    """A base graph together with fill edges that make it chordal."""

    base: Graph
    fill: frozenset[frozenset] = frozenset()

    def __post_init__(self) -> None:
        clash = self.fill & self.base.edges
        if clash:
            raise ValueError(f"fill edges already in the graph: {[tuple(e) for e in clash]}")

    @cached_property
    def graph(self) -> Graph:
        return Graph(self.base.vertices, self.base.edges | self.fill)

    def sorted_fill(self) -> list[tuple]:
        return sorted(pair(*e) for e in self.fill)

    def to_json(self, name=str) -> dict:
        return {"fill": [[name(u), name(v)] for u, v in self.sorted_fill()]}


def triangulation_from_decomposition(graph: Graph, dec: TreeDecomposition) -> Triangulation:
    """The fill-in made of all co-bagged non-adjacent pairs."""
    if not validate_decomposition(graph, dec):
        raise PreconditionError("not a valid tree decomposition of the graph")
    fill = set()
    for bag in dec.bags.values():
        members = sorted(bag)
        for i, u in enumerate(members):
            for v in members[i + 1 :]:
                if not graph.has_edge(u, v):
                    fill.add(frozenset((u, v)))
    return Triangulation(graph, frozenset(fill))


def width(dec: TreeDecomposition) -> int:
    return max(len(b) for b in dec.bags.values()) - 1
