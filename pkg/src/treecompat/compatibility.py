"""Deciding compatibility through legal triangulations, plus a brute-force oracle."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .chordal import CliqueTree, TreeDecomposition, Triangulation, build_clique_tree, triangulation_from_decomposition
from .display_graph import DisplayGraph, build_display_graph, tree_components
from .errors import ExtractionError, InputError, InstanceTooLarge
from .extraction import ExtractionResult, extract_supertree
from .legal import DEFAULT_LIMIT, SearchOutcome, check_concise, check_legal, make_concise, search_with_stats
from .trees import EmbeddingFunction, PhyloTree, Profile, compute_embedding, displays, preprocess_profile, restrict

ORACLE_MAX_TAXA = 8


@dataclass
class ComponentWitness:
    """Everything produced while solving one connected part of the display graph."""

    trees: tuple[int, ...]
    graph: DisplayGraph
    search: SearchOutcome
    triangulation: Triangulation
    concise: TreeDecomposition
    concise_triangulation: Triangulation
    clique_tree: CliqueTree
    extraction: ExtractionResult


@dataclass
class Witness:
    supertree: PhyloTree
    embeddings: list[EmbeddingFunction]
    components: list[ComponentWitness] = field(default_factory=list)


@dataclass
class CompatReport:
    compatible: bool
    witness: Witness | None = None
    certificate: str | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .newick import write_tree

        out: dict = {"compatible": self.compatible}
        if self.witness is not None:
            out["supertree"] = write_tree(self.witness.supertree)
            out["components"] = [
                {
                    "trees": list(c.trees),
                    "fill": c.triangulation.to_json(c.graph.name)["fill"],
                    "concise_fill": c.concise_triangulation.to_json(c.graph.name)["fill"],
                }
                for c in self.witness.components
            ]
        if self.certificate is not None:
            out["certificate"] = self.certificate
        out["stats"] = {k: self.stats[k] for k in sorted(self.stats) if k != "seconds"}
        return out


def join_supertrees(parts: Sequence[PhyloTree], extra_labels: Sequence[str] = ()) -> PhyloTree:
    """Hang every part and every extra label from one new hub vertex, then normalize."""
    covered = frozenset().union(*(p.leaf_labels for p in parts)) if parts else frozenset()
    extra = sorted(set(extra_labels) - covered)
    if len(parts) == 1 and not extra:
        return parts[0]
    if not parts and len(extra) <= 2:
        if not extra:
            raise InputError("nothing to join")
        if len(extra) == 1:
            return PhyloTree((extra[0],), frozenset(), {extra[0]: extra[0]})
        a, b = extra
        return PhyloTree.from_edges([(a, b)], {a: a, b: b})
    vertices = ["hub"]
    edges = []
    labels = {}
    for i, part in enumerate(parts):
        rename = {v: f"c{i}/{v}" for v in part.vertices}
        vertices += [rename[v] for v in part.vertices]
        labels.update({rename[v]: lab for v, lab in part.labels.items()})
        part_edges = part.sorted_edges()
        if not part_edges:
            edges.append(("hub", rename[part.vertices[0]]))
            continue
        a, b = part_edges[0]
        mid = f"c{i}/join"
        vertices.append(mid)
        edges += [(rename[a], mid), (mid, rename[b]), ("hub", mid)]
        edges += [(rename[p], rename[q]) for p, q in part_edges[1:]]
    for lab in extra:
        leaf = f"extra/{lab}"
        vertices.append(leaf)
        labels[leaf] = lab
        edges.append(("hub", leaf))
    raw = PhyloTree.from_edges(edges, labels, vertices)
    return restrict(raw, raw.leaf_labels)


def decide(profile: Profile, limit: int | None = DEFAULT_LIMIT, method: str = "auto") -> CompatReport:
    """Compatibility via a legal triangulation of the display graph.

    Trees with fewer than three leaves are set aside; each connected part of
    the display graph is searched separately and the part supertrees are
    joined at the end.
    """
    start = time.perf_counter()
    kept, dropped = preprocess_profile(profile)
    stats = {"trees": len(profile), "components": 0, "candidates": 0, "examined": 0, "pruned": 0}
    components: list[ComponentWitness] = []
    parts: list[PhyloTree] = []
    if kept:
        core = Profile(tuple(profile.trees[i] for i in kept))
        for group in tree_components(core):
            ids = tuple(kept[j] for j in group)
            sub = Profile(tuple(profile.trees[i] for i in ids))
            g = build_display_graph(sub, ids)
            outcome = search_with_stats(g, limit, method)
            stats["components"] += 1
            stats["candidates"] += outcome.candidates
            stats["examined"] += outcome.examined
            stats["pruned"] += outcome.pruned
            if not outcome.found:
                stats["seconds"] = time.perf_counter() - start
                trees = ",".join(map(str, ids))
                return CompatReport(False, None, f"trees {trees}: {outcome.summary()}", stats)
            components.append(_solve_component(ids, g, outcome))
            parts.append(components[-1].extraction.supertree)
    supertree = join_supertrees(parts, sorted(dropped))
    for i, t in enumerate(profile.trees):
        if not displays(supertree, t):
            raise ExtractionError(f"joined supertree does not display tree {i}")
    embeddings = [compute_embedding(supertree, t) for t in profile.trees]
    stats["seconds"] = time.perf_counter() - start
    return CompatReport(True, Witness(supertree, embeddings, components), None, stats)


def _solve_component(ids: tuple[int, ...], g: DisplayGraph, outcome: SearchOutcome) -> ComponentWitness:
    tri = outcome.triangulation
    ct = build_clique_tree(tri.graph)
    concise = make_concise(g, ct)
    concise_tri = triangulation_from_decomposition(g.graph, concise)
    if not (check_legal(g, concise_tri) and check_concise(g, concise_tri)):
        raise ExtractionError("contraction did not produce a concise legal triangulation")
    ct2 = build_clique_tree(concise_tri.graph)
    extraction = extract_supertree(g, ct2)
    return ComponentWitness(ids, g, outcome, tri, concise, concise_tri, ct2, extraction)


# ---------------------------------------------------------------------------
# brute force


def _fresh_tree(labels: Sequence[str]) -> PhyloTree:
    a, b, c = labels[:3]
    return PhyloTree.from_edges([("#0", a), ("#0", b), ("#0", c)], {a: a, b: b, c: c})


def _insert_leaf(tree: PhyloTree, e: tuple[str, str], label: str, mid: str) -> PhyloTree:
    a, b = e
    edges = [p for p in tree.sorted_edges() if set(p) != {a, b}]
    edges += [(a, mid), (mid, b), (mid, label)]
    labels = dict(tree.labels)
    labels[label] = label
    return PhyloTree.from_edges(edges, labels, list(tree.vertices) + [mid, label])


def enumerate_binary_topologies(labels: Sequence[str]) -> Iterator[PhyloTree]:
    """Every unrooted binary tree on ``labels`` exactly once, by leaf insertion."""
    labels = sorted(set(labels))
    n = len(labels)
    if not 3 <= n <= ORACLE_MAX_TAXA:
        raise InputError(f"topology enumeration supports 3..{ORACLE_MAX_TAXA} labels, got {n}")

    def grow(tree: PhyloTree, i: int) -> Iterator[PhyloTree]:
        if i == n:
            yield tree
            return
        for e in tree.sorted_edges():
            yield from grow(_insert_leaf(tree, e, labels[i], f"#{i - 2}"), i + 1)

    yield from grow(_fresh_tree(labels), 3)


def brute_force_compatible(profile: Profile) -> CompatReport:
    """Try every binary supertree; refining a supertree never loses a displayed tree."""
    start = time.perf_counter()
    labels = sorted(profile.labels)
    n = len(labels)
    if n > ORACLE_MAX_TAXA:
        raise InstanceTooLarge(n, ORACLE_MAX_TAXA, "taxa")
    if n < 3:
        tree = join_supertrees([], labels)
        return CompatReport(True, Witness(tree, [compute_embedding(tree, t) for t in profile]), None, {"topologies": 1})
    tried = 0
    for tree in enumerate_binary_topologies(labels):
        tried += 1
        if all(displays(tree, t) for t in profile.trees):
            embeddings = [compute_embedding(tree, t) for t in profile.trees]
            stats = {"topologies": tried, "seconds": time.perf_counter() - start}
            return CompatReport(True, Witness(tree, embeddings), None, stats)
    stats = {"topologies": tried, "seconds": time.perf_counter() - start}
    return CompatReport(False, None, f"none of {tried} binary topologies displays every tree", stats)


# ---------------------------------------------------------------------------
# random instances


def default_labels(count: int) -> list[str]:
    if count <= 26:
        return [chr(ord("a") + i) for i in range(count)]
    return [f"t{i}" for i in range(count)]


def random_binary_tree(labels: Sequence[str], rng: random.Random) -> PhyloTree:
    """Uniform binary topology by inserting leaves into uniformly chosen edges."""
    labels = list(labels)
    if len(labels) < 3:
        raise InputError("random trees need at least three labels")
    rng.shuffle(labels)
    tree = _fresh_tree(labels)
    for i, lab in enumerate(labels[3:], start=1):
        tree = _insert_leaf(tree, rng.choice(tree.sorted_edges()), lab, f"#{i}")
    # renumber internal vertices in a tidy order
    inner = {v: f"v{j}" for j, v in enumerate(tree.internal_vertices)}
    edges = [(inner.get(a, a), inner.get(b, b)) for a, b in tree.sorted_edges()]
    return PhyloTree.from_edges(edges, dict(tree.labels), [inner.get(v, v) for v in tree.vertices])


def random_profile(
    seed: int, k: int, n: int, overlap: float, universe: int | None = None
) -> Profile:
    """``k`` random binary trees on ``n`` taxa each.

    ``round(overlap * n)`` taxa are shared by every tree. The remaining taxa of
    each tree are drawn from the rest of a universe of ``universe`` labels
    (default: large enough that they are private to their tree).
    """
    if k < 1 or n < 3:
        raise InputError("need k >= 1 and n >= 3")
    if not 0.0 <= overlap <= 1.0:
        raise InputError("overlap must lie in [0, 1]")
    shared = round(overlap * n)
    private = universe is None
    if private:
        universe = shared + k * (n - shared)
    if universe < n:
        raise InputError(f"a universe of {universe} taxa cannot hold trees of {n} taxa")
    rng = random.Random(seed)
    pool = default_labels(universe)
    rng.shuffle(pool)
    core, rest = pool[:shared], pool[shared:]
    width = n - shared
    trees = []
    for j in range(k):
        own = rest[j * width : (j + 1) * width] if private else rng.sample(rest, width)
        trees.append(random_binary_tree(sorted(core + own), rng))
    return Profile(tuple(trees))
