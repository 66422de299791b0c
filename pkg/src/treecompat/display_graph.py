"""The display graph: disjoint union of the input trees, leaves glued by label."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .chordal import Graph, pair
from .errors import InputError
from .trees import Profile


@dataclass(frozen=True)
class VertexInfo:
    kind: str  # "leaf" or "internal"
    label: str | None = None
    tree: int | None = None  # position in the profile, internal vertices only
    original: str | None = None  # vertex id inside that tree


@dataclass(frozen=True)
class DisplayGraph:
    """Display graph over dense integer vertices.

    Leaves come first (sorted by label), then the internal vertices of each
    tree in profile order and tree vertex order.
    """

    profile: Profile
    graph: Graph
    info: tuple[VertexInfo, ...]
    edge_origin: dict[frozenset[int], tuple[int, bool]]
    tree_ids: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.graph.vertices

    def is_leaf(self, v: int) -> bool:
        return self.info[v].kind == "leaf"

    def is_internal(self, v: int) -> bool:
        return self.info[v].kind == "internal"

    def is_internal_edge(self, u: int, v: int) -> bool:
        return self.edge_origin[frozenset((u, v))][1]

    @cached_property
    def internal_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(e for e in self.graph.sorted_edges() if self.edge_origin[frozenset(e)][1])

    @cached_property
    def leaf_of(self) -> dict[str, int]:
        return {i.label: v for v, i in enumerate(self.info) if i.kind == "leaf"}

    @cached_property
    def tree_vertex(self) -> tuple[dict[str, int], ...]:
        """Per tree position: original vertex id -> display-graph vertex."""
        out: list[dict[str, int]] = []
        for t in self.profile.trees:
            out.append({orig: self.leaf_of[lab] for orig, lab in t.labels.items()})
        for v, i in enumerate(self.info):
            if i.kind == "internal":
                out[i.tree][i.original] = v
        return tuple(out)

    @cached_property
    def trees_of(self) -> tuple[frozenset[int], ...]:
        """Tree positions whose vertex set contains each display-graph vertex."""
        out = []
        for i in self.info:
            if i.kind == "internal":
                out.append(frozenset({i.tree}))
            else:
                out.append(frozenset(k for k, t in enumerate(self.profile.trees) if i.label in t.leaf_labels))
        return tuple(out)

    def original(self, v: int, k: int) -> str:
        """The vertex of tree ``k`` that ``v`` came from."""
        i = self.info[v]
        if i.kind == "internal":
            if i.tree != k:
                raise KeyError(f"vertex {v} is not from tree {k}")
            return i.original
        return self.profile.trees[k].vertex_of[i.label]

    def internal_vertices(self) -> frozenset[int]:
        return frozenset(v for v in self.vertices if self.is_internal(v))

    def leaf_vertices(self) -> frozenset[int]:
        return frozenset(v for v in self.vertices if self.is_leaf(v))

    def candidate_fill_edges(self) -> list[tuple[int, int]]:
        """Non-adjacent internal pairs from different trees, sorted."""
        inner = sorted(self.internal_vertices())
        out = []
        for a, u in enumerate(inner):
            for v in inner[a + 1 :]:
                if self.info[u].tree != self.info[v].tree and not self.graph.has_edge(u, v):
                    out.append((u, v))
        return out

    # naming ---------------------------------------------------------------

    def name(self, v: int) -> str:
        i = self.info[v]
        if i.kind == "leaf":
            return f"leaf.{i.label}"
        return f"t{self.tree_ids[i.tree]}.{i.original}"

    @cached_property
    def _names(self) -> dict[str, int]:
        return {self.name(v): v for v in self.vertices}

    def resolve(self, ref: str) -> int:
        """Vertex from ``leaf.<label>``, ``t<k>.<id>``, a bare internal id or a bare label."""
        if ref in self._names:
            return self._names[ref]
        hits = [v for v, i in enumerate(self.info) if i.kind == "internal" and i.original == ref]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise InputError(f"vertex name {ref!r} is ambiguous; use t<k>.{ref}")
        if ref in self.leaf_of:
            return self.leaf_of[ref]
        raise InputError(f"unknown vertex {ref!r}")

    def to_json(self) -> dict:
        vertices = []
        for v, i in enumerate(self.info):
            entry = {"id": self.name(v), "kind": i.kind}
            if i.kind == "leaf":
                entry["label"] = i.label
                entry["trees"] = [self.tree_ids[k] for k in sorted(self.trees_of[v])]
            else:
                entry["tree"] = self.tree_ids[i.tree]
                entry["vertex"] = i.original
            vertices.append(entry)
        edges = [
            {
                "u": self.name(u),
                "v": self.name(v),
                "tree": self.tree_ids[self.edge_origin[frozenset((u, v))][0]],
                "internal": self.edge_origin[frozenset((u, v))][1],
            }
            for u, v in self.graph.sorted_edges()
        ]
        return {"vertices": vertices, "edges": edges}


def build_display_graph(profile: Profile, tree_ids: Sequence[int] | None = None) -> DisplayGraph:
    tree_ids = tuple(range(len(profile))) if tree_ids is None else tuple(tree_ids)
    info: list[VertexInfo] = [VertexInfo("leaf", label=lab) for lab in sorted(profile.labels)]
    leaf_of = {i.label: v for v, i in enumerate(info)}
    local: list[dict[str, int]] = []
    for k, t in enumerate(profile.trees):
        ids = {orig: leaf_of[lab] for orig, lab in t.labels.items()}
        for orig in t.internal_vertices:
            ids[orig] = len(info)
            info.append(VertexInfo("internal", tree=k, original=orig))
        local.append(ids)
    edges = {}
    for k, t in enumerate(profile.trees):
        for a, b in t.sorted_edges():
            e = frozenset((local[k][a], local[k][b]))
            edges[e] = (k, t.is_internal_edge(frozenset((a, b))))
    graph = Graph(tuple(range(len(info))), frozenset(edges))
    return DisplayGraph(profile, graph, tuple(info), edges, tree_ids)


def internal_vertices(g: DisplayGraph) -> frozenset[int]:
    return g.internal_vertices()


def candidate_fill_edges(g: DisplayGraph) -> list[tuple[int, int]]:
    return g.candidate_fill_edges()


def tree_components(profile: Profile) -> list[list[int]]:
    """Groups of tree positions whose display graphs are connected to each other."""
    parent = list(range(len(profile)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    owner: dict[str, int] = {}
    for k, t in enumerate(profile.trees):
        for lab in sorted(t.leaf_labels):
            if lab in owner:
                ra, rb = find(owner[lab]), find(k)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            else:
                owner[lab] = k
    groups: dict[int, list[int]] = {}
    for k in range(len(profile)):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values())


def fill_from_names(g: DisplayGraph, names: Sequence[Sequence[str]]) -> frozenset[frozenset[int]]:
    out = set()
    for entry in names:
        if len(entry) != 2:
            raise InputError(f"fill entries are pairs, got {list(entry)}")
        u, v = (g.resolve(x) for x in entry)
        if u == v:
            raise InputError(f"fill entry {list(entry)} is a loop")
        if g.graph.has_edge(u, v):
            raise InputError(f"fill entry {list(entry)} is already an edge of the display graph")
        out.add(frozenset(pair(u, v)))
    return frozenset(out)
