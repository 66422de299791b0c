"""Turn a concise legal triangulation into a supertree with embedding functions."""

from __future__ import annotations

from dataclasses import dataclass

from .chordal import TreeDecomposition, triangulation_from_decomposition
from .display_graph import DisplayGraph
from .errors import ExtractionError, PreconditionError
from .legal import bags_containing, check_concise, check_legal, edge_neighborhood
from .trees import EmbeddingFunction, PhyloTree, displays, embedding_violations, restrict


@dataclass(frozen=True)
class ExtractionResult:
    """``embeddings[k]`` maps ``raw_tree`` onto input tree ``k``; ``supertree`` is its normal form."""

    supertree: PhyloTree
    raw_tree: PhyloTree
    embeddings: tuple[EmbeddingFunction, ...]


def normalize_supertree(raw: PhyloTree) -> PhyloTree:
    """Drop unlabelled dead ends and suppress unlabelled degree-2 vertices."""
    for v in raw.labels:
        if raw.degree(v) > 1:
            raise ExtractionError(f"labelled vertex {v!r} has degree {raw.degree(v)}")
    return restrict(raw, raw.leaf_labels)


def _require_concise(g: DisplayGraph, dec: TreeDecomposition) -> None:
    tri = triangulation_from_decomposition(g.graph, dec)
    if not check_legal(g, tri):
        raise PreconditionError("extraction needs a legal triangulation")
    if not check_concise(g, tri):
        raise PreconditionError("extraction needs a concise triangulation")
    for v in sorted(g.leaf_vertices()):
        if len(bags_containing(dec, v)) != 1:
            raise PreconditionError(f"leaf {g.name(v)} appears in several nodes")
    for u, v in g.internal_edges:
        if len(edge_neighborhood(dec, u, v)) != 1:
            raise PreconditionError(f"internal edge {g.name(u)}-{g.name(v)} appears in several nodes")


def extract_supertree(g: DisplayGraph, ct: TreeDecomposition) -> ExtractionResult:
    """Build the supertree from a clique tree of a concise legal triangulation.

    Per node: a labelled vertex in the bag gets a new pendant leaf (case 1); a
    bag holding an internal edge is split in two along that edge (case 2);
    otherwise the node maps to the single vertex each tree has in the bag
    (case 3). Neighbours that hold neither end of a split edge go to the first
    half. Every embedding and every display relation is re-verified.
    """
    _require_concise(g, ct)
    trees = g.profile.trees
    k = len(trees)
    phis: list[dict[str, str]] = [{} for _ in range(k)]
    split: dict[int, tuple[int, int, str, str]] = {}
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    labels: dict[str, str] = {}

    def assign(i: int, node: str, target: int) -> None:
        orig = g.original(target, i)
        if phis[i].get(node, orig) != orig:
            raise ExtractionError(f"node {node} maps to two vertices of tree {i}")
        phis[i][node] = orig

    for x in sorted(ct.nodes):
        bag = ct.bags[x]
        leaves = sorted(v for v in bag if g.is_leaf(v))
        inner_edges = [(u, v) for u, v in g.internal_edges if u in bag and v in bag]
        if leaves and inner_edges:
            raise ExtractionError(f"node {x} holds both a leaf and an internal edge")
        if len(inner_edges) > 1:
            raise ExtractionError(f"node {x} holds two internal edges")
        per_tree = [sorted(v for v in bag if i in g.trees_of[v]) for i in range(k)]

        if inner_edges:
            u, v = inner_edges[0]
            home = g.info[u].tree
            xu, xv = f"n{x}a", f"n{x}b"
            split[x] = (u, v, xu, xv)
            vertices += [xu, xv]
            edges.append((xu, xv))
            assign(home, xu, u)
            assign(home, xv, v)
            for i in range(k):
                if i == home or not per_tree[i]:
                    continue
                if len(per_tree[i]) > 1:
                    raise ExtractionError(f"node {x} holds two vertices of tree {i}")
                assign(i, xu, per_tree[i][0])
                assign(i, xv, per_tree[i][0])
            continue

        node = f"n{x}"
        vertices.append(node)
        done = set()
        for v in leaves:
            leaf = f"leaf:{g.info[v].label}"
            vertices.append(leaf)
            edges.append((node, leaf))
            labels[leaf] = g.info[v].label
            for i in sorted(g.trees_of[v]):
                t = trees[i]
                (nbr,) = t.adjacency[t.vertex_of[g.info[v].label]]
                u = g.tree_vertex[i][nbr]
                if u not in bag:
                    raise ExtractionError(f"node {x} misses the neighbour of leaf {g.name(v)}")
                assign(i, leaf, v)
                assign(i, node, u)
                done.add(i)
        for i in range(k):
            if i in done or not per_tree[i]:
                continue
            if len(per_tree[i]) > 1:
                raise ExtractionError(f"node {x} holds two vertices of tree {i}")
            assign(i, node, per_tree[i][0])

    def attach(x: int, y: int) -> str:
        if x not in split:
            return f"n{x}"
        u, v, xu, xv = split[x]
        return xv if v in ct.bags[y] and u not in ct.bags[y] else xu

    for x, y in ct.sorted_tree_edges():
        edges.append((attach(x, y), attach(y, x)))

    raw = PhyloTree.from_edges(edges, labels, vertices)
    embeddings = tuple(EmbeddingFunction(raw, trees[i], phis[i]) for i in range(k))
    for i, phi in enumerate(embeddings):
        problems = embedding_violations(phi)
        if problems:
            raise ExtractionError(f"embedding onto tree {i} failed: {'; '.join(problems)}")
    supertree = normalize_supertree(raw)
    for i, t in enumerate(trees):
        if not displays(supertree, t):
            raise ExtractionError(f"supertree does not display tree {i}")
    return ExtractionResult(supertree, raw, embeddings)
