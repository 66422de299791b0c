"""Unrooted leaf-labelled trees: restriction, contraction, display and embeddings.

Vertices are string identifiers. Labels live only on vertices of degree <= 1;
a tree is *normalized* when additionally every unlabelled vertex has degree >= 3
and every degree-1 vertex is labelled.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InputError


def edge(u: str, v: str) -> frozenset[str]:
    return frozenset((u, v))


@dataclass(frozen=True)
class PhyloTree:
    """An unrooted tree whose labelled vertices are its leaves.

    ``vertices`` keeps construction order; every algorithm that needs a
    deterministic vertex order uses it.
    """

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]
    labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if not self.vertices:
            raise InputError("a tree needs at least one vertex")
        if len(vs) != len(self.vertices):
            raise InputError("duplicate vertex identifiers")
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise InputError(f"bad edge {sorted(e)}")
        if len(self.edges) != len(vs) - 1:
            raise InputError("edge count does not match a tree")
        if not set(self.labels) <= vs:
            raise InputError("label on unknown vertex")
        names = list(self.labels.values())
        if any(not n for n in names):
            raise InputError("empty label")
        if len(set(names)) != len(names):
            raise InputError("duplicate leaf label")
        adj = self.adjacency
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(vs):
            raise InputError("tree is not connected")
        for v in self.labels:
            if len(adj[v]) > 1:
                raise InputError(f"label {self.labels[v]!r} sits on an internal vertex")

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str]],
        labels: Mapping[str, str] | None = None,
        vertices: Iterable[str] | None = None,
    ) -> PhyloTree:
        edges = [tuple(e) for e in edges]
        if vertices is None:
            order: dict[str, None] = {}
            for u, v in edges:
                order.setdefault(u)
                order.setdefault(v)
            vertices = list(order)
        return cls(tuple(vertices), frozenset(edge(u, v) for u, v in edges), dict(labels or {}))

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        nbrs: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            nbrs[u].append(v)
            nbrs[v].append(u)
        pos = self.position
        return {v: tuple(sorted(ns, key=pos.__getitem__)) for v, ns in nbrs.items()}

    @cached_property
    def position(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def vertex_of(self) -> dict[str, str]:
        """Label -> vertex."""
        return {lab: v for v, lab in self.labels.items()}

    @property
    def leaf_labels(self) -> frozenset[str]:
        return frozenset(self.labels.values())

    def degree(self, v: str) -> int:
        return len(self.adjacency[v])

    def is_labeled(self, v: str) -> bool:
        return v in self.labels

    @property
    def internal_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.labels)

    def is_internal_edge(self, e: frozenset[str]) -> bool:
        return not any(v in self.labels for v in e)

    def sorted_edges(self) -> list[tuple[str, str]]:
        pos = self.position
        out = [tuple(sorted(e, key=pos.__getitem__)) for e in self.edges]
        return sorted(out, key=lambda p: (pos[p[0]], pos[p[1]]))

    @property
    def is_normalized(self) -> bool:
        for v in self.vertices:
            d = self.degree(v)
            if v in self.labels:
                continue
            if d < 3:
                return False
        return True

    def __repr__(self) -> str:
        from .newick import write_tree

        return f"PhyloTree({write_tree(self)!r})"


@dataclass(frozen=True)
class Profile:
    trees: tuple[PhyloTree, ...]

    def __post_init__(self) -> None:
        if not self.trees:
            raise InputError("a profile needs at least one tree")

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, i: int) -> PhyloTree:
        return self.trees[i]

    @property
    def labels(self) -> frozenset[str]:
        return frozenset().union(*(t.leaf_labels for t in self.trees))


def preprocess_profile(profile: Profile) -> tuple[list[int], frozenset[str]]:
    """Indices of trees with >= 3 leaves, and the labels of the dropped ones.

    A tree on one or two taxa is displayed by every tree containing its labels,
    so it only matters for label coverage of the supertree.
    """
    kept = [i for i, t in enumerate(profile.trees) if len(t.labels) >= 3]
    dropped = frozenset().union(
        *(t.leaf_labels for i, t in enumerate(profile.trees) if i not in kept)
    )
    return kept, dropped


# ---------------------------------------------------------------------------
# restriction and contraction


def restrict_with_origins(
    tree: PhyloTree, keep_labels: Iterable[str]
) -> tuple[PhyloTree, dict[str, frozenset[str]]]:
    """``tree | keep_labels`` plus, per result vertex, the tree vertices merged into it.

    Interior vertices of a suppressed path are credited to an unlabelled end of
    the path when there is one, so that labelled vertices keep singleton origins.
    """
    keep_labels = set(keep_labels)
    if not keep_labels:
        raise InputError("cannot restrict to an empty label set")
    unknown = keep_labels - tree.leaf_labels
    if unknown:
        raise InputError(f"unknown labels: {sorted(unknown)}")

    adj = {v: set(ns) for v, ns in tree.adjacency.items()}
    wanted = {tree.vertex_of[lab] for lab in keep_labels}
    queue = deque(v for v in tree.vertices if len(adj[v]) <= 1 and v not in wanted)
    alive = set(tree.vertices)
    while queue:
        v = queue.popleft()
        if v not in alive or v in wanted or len(adj[v]) > 1:
            continue
        alive.discard(v)
        for w in adj.pop(v):
            adj[w].discard(v)
            if len(adj[w]) <= 1 and w not in wanted:
                queue.append(w)

    order = [v for v in tree.vertices if v in alive]
    pos = tree.position

    def passthrough(v: str) -> bool:
        return v not in tree.labels and len(adj[v]) == 2

    anchors = [v for v in order if not passthrough(v)]
    origins: dict[str, set[str]] = {v: {v} for v in anchors}
    new_edges: set[frozenset[str]] = set()
    for a in anchors:
        for start in adj[a]:
            path = []
            prev, cur = a, start
            while passthrough(cur):
                path.append(cur)
                nxt = next(w for w in adj[cur] if w != prev)
                prev, cur = cur, nxt
            e = edge(a, cur)
            if e in new_edges:
                continue
            new_edges.add(e)
            ends = sorted(e, key=pos.__getitem__)
            owner = next((v for v in ends if v not in tree.labels), ends[0])
            origins[owner].update(path)
    labels = {v: tree.labels[v] for v in anchors if v in tree.labels}
    result = PhyloTree(tuple(anchors), frozenset(new_edges), labels)
    return result, {v: frozenset(s) for v, s in origins.items()}


def restrict(tree: PhyloTree, keep_labels: Iterable[str]) -> PhyloTree:
    """The subtree induced by ``keep_labels`` with degree-2 vertices suppressed."""
    return restrict_with_origins(tree, keep_labels)[0]


def contract_edge(tree: PhyloTree, e: Iterable[str]) -> PhyloTree:
    """Merge the two unlabelled endpoints of ``e``; the merged vertex keeps the earlier id."""
    e = frozenset(e)
    if e not in tree.edges:
        raise InputError(f"{sorted(e)} is not an edge of the tree")
    if any(v in tree.labels for v in e):
        raise InputError("cannot contract an edge incident to a labelled vertex")
    keep, gone = sorted(e, key=tree.position.__getitem__)
    new_edges = set()
    for f in tree.edges:
        if f == e:
            continue
        if gone in f:
            (other,) = f - {gone}
            f = edge(keep, other)
        new_edges.add(f)
    vertices = tuple(v for v in tree.vertices if v != gone)
    return PhyloTree(vertices, frozenset(new_edges), dict(tree.labels))


# ---------------------------------------------------------------------------
# splits, canonical forms, display


def _side_labels(tree: PhyloTree, start: str, banned: str) -> frozenset[str]:
    adj = tree.adjacency
    seen = {start, banned}
    stack = [start]
    found = []
    while stack:
        v = stack.pop()
        if v in tree.labels:
            found.append(tree.labels[v])
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(found)


def edge_split(tree: PhyloTree, e: frozenset[str]) -> frozenset[str]:
    """The bipartition induced by ``e``, as the side avoiding the smallest label."""
    u, v = tuple(e)
    side = _side_labels(tree, u, v)
    if min(tree.leaf_labels) in side:
        side = tree.leaf_labels - side
    return side


def splits(tree: PhyloTree) -> frozenset[frozenset[str]]:
    """Nontrivial splits: both sides carry at least two labels."""
    n = len(tree.labels)
    out = set()
    for e in tree.edges:
        s = edge_split(tree, e)
        if 2 <= len(s) <= n - 2:
            out.add(s)
    return frozenset(out)


def canonical_form(tree: PhyloTree) -> str:
    """A string equal for two trees iff they are isomorphic by a label-preserving map."""
    if not tree.labels:
        raise InputError("canonical form needs at least one label")
    root = tree.vertex_of[min(tree.leaf_labels)]
    adj = tree.adjacency

    def rec(v: str, parent: str | None) -> str:
        kids = sorted(rec(w, v) for w in adj[v] if w != parent)
        head = tree.labels.get(v, "")
        return f"{head!r}({','.join(kids)})" if kids else repr(head)

    return rec(root, None)


def isomorphic(t1: PhyloTree, t2: PhyloTree) -> bool:
    return t1.leaf_labels == t2.leaf_labels and canonical_form(t1) == canonical_form(t2)


def displays(tree: PhyloTree, other: PhyloTree) -> bool:
    """Whether ``other`` is obtained from ``tree | L(other)`` by contracting edges.

    Decided with splits: contraction deletes splits and never creates them.
    """
    if not other.leaf_labels <= tree.leaf_labels:
        raise InputError("displayed tree has labels missing from the displaying tree")
    return splits(other) <= splits(restrict(tree, other.leaf_labels))


# ---------------------------------------------------------------------------
# embedding functions


@dataclass(frozen=True)
class EmbeddingFunction:
    """Partial map from ``source`` vertices onto ``target`` vertices."""

    source: PhyloTree
    target: PhyloTree
    mapping: Mapping[str, str]

    def preimage(self, t: str) -> list[str]:
        return [s for s in self.source.vertices if self.mapping.get(s) == t]


def embedding_violations(phi: EmbeddingFunction) -> list[str]:
    """Human-readable list of failed embedding conditions; empty means valid."""
    src, tgt, m = phi.source, phi.target, phi.mapping
    problems = []
    if not set(m) <= set(src.vertices):
        problems.append("domain contains vertices outside the source tree")
        return problems
    if not set(m.values()) <= set(tgt.vertices):
        problems.append("image contains vertices outside the target tree")
        return problems
    missing = set(tgt.vertices) - set(m.values())
    if missing:
        problems.append(f"not surjective: {sorted(missing)} have no preimage")

    # EF1, read as: every labelled vertex whose label the target carries maps to
    # that leaf, and no other labelled vertex is mapped at all.
    for s, lab in src.labels.items():
        if lab in tgt.leaf_labels:
            if m.get(s) != tgt.vertex_of[lab]:
                problems.append(f"EF1: leaf {lab!r} not mapped to its namesake")
        elif s in m:
            problems.append(f"EF1: leaf {lab!r} is absent from the target but mapped")

    classes: dict[str, list[str]] = {}
    for s in src.vertices:
        if s in m:
            classes.setdefault(m[s], []).append(s)
    for t, members in classes.items():
        inside = set(members)
        seen = {members[0]}
        stack = [members[0]]
        while stack:
            for w in src.adjacency[stack.pop()]:
                if w in inside and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != inside:
            problems.append(f"EF2: preimage of {t!r} is disconnected")

    for e in tgt.edges:
        u, v = tuple(e)
        hits = 0
        for f in src.edges:
            a, b = tuple(f)
            if {m.get(a), m.get(b)} == {u, v} and u != v:
                hits += 1
        if hits != 1:
            problems.append(f"EF3: target edge {sorted(e)} has {hits} source edges")
    return problems


def verify_embedding(phi: EmbeddingFunction) -> bool:
    return not embedding_violations(phi)


def _clusters(adj: Mapping[str, Iterable[str]], labels: Mapping[str, str], root: str) -> dict[str, frozenset[str]]:
    """Labels below each vertex when the tree hangs from ``root``."""
    order = [root]
    parent = {root: None}
    for v in order:
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
    below: dict[str, set[str]] = {v: set() for v in order}
    for v in reversed(order):
        if v in labels and v != root:
            below[v].add(labels[v])
        if parent[v] is not None:
            below[parent[v]] |= below[v]
    return {v: frozenset(s) for v, s in below.items()}


def compute_embedding(tree: PhyloTree, sub: PhyloTree) -> EmbeddingFunction | None:
    """An embedding function from ``tree`` onto ``sub``, or None if ``tree`` does not display it."""
    if not sub.leaf_labels <= tree.leaf_labels:
        raise InputError("embedded tree has labels missing from the host tree")
    if not displays(tree, sub):
        return None
    restricted, origin = restrict_with_origins(tree, sub.leaf_labels)
    wanted = splits(sub)

    # contract restricted edges whose split the target lacks
    parent = {v: v for v in restricted.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    n = len(restricted.labels)
    for e in restricted.sorted_edges():
        fe = frozenset(e)
        if not restricted.is_internal_edge(fe):
            continue
        s = edge_split(restricted, fe)
        if 2 <= len(s) <= n - 2 and s not in wanted:
            a, b = find(e[0]), find(e[1])
            parent[b] = a
    quotient: dict[str, set[str]] = {}
    for v in restricted.vertices:
        quotient.setdefault(find(v), set())
    for e in restricted.edges:
        a, b = (find(v) for v in e)
        if a != b:
            quotient[a].add(b)
            quotient[b].add(a)
    q_labels = {find(v): lab for v, lab in restricted.labels.items()}

    root_label = min(sub.leaf_labels)
    q_root = find(restricted.vertex_of[root_label])
    s_root = sub.vertex_of[root_label]
    q_clusters = _clusters(quotient, q_labels, q_root)
    s_clusters = _clusters(sub.adjacency, sub.labels, s_root)
    by_cluster = {c: v for v, c in s_clusters.items() if v != s_root}
    image = {q_root: s_root}
    for q, c in q_clusters.items():
        if q != q_root:
            image[q] = by_cluster[c]

    mapping = {}
    for v in restricted.vertices:
        for x in origin[v]:
            mapping[x] = image[find(v)]
    return EmbeddingFunction(tree, sub, mapping)
