"""Legal and concise triangulations of display graphs.

A triangulation of a display graph is *legal* when

* LT1: a clique holding an internal edge holds no other display-graph edge;
* LT2: every fill edge joins two internal vertices.

It is *concise* when additionally every internal edge and every leaf vertex
lies in exactly one maximal clique.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .chordal import (
    TreeDecomposition,
    Triangulation,
    is_chordal,
    maximal_cliques,
    triangulation_from_decomposition,
)
from .display_graph import DisplayGraph, build_display_graph
from .errors import InputError, InstanceTooLarge, PreconditionError
from .trees import EmbeddingFunction, PhyloTree, Profile, embedding_violations

DEFAULT_LIMIT = 24


@dataclass
class LegalityReport:
    lt1_violations: list[tuple[tuple[int, ...], tuple[tuple[int, int], tuple[int, int]]]] = field(
        default_factory=list
    )
    lt2_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def legal(self) -> bool:
        return not self.lt1_violations and not self.lt2_violations

    def __bool__(self) -> bool:
        return self.legal

    def to_json(self, name=str) -> dict:
        return {
            "legal": self.legal,
            "lt1_violations": [
                {
                    "clique": [name(v) for v in clique],
                    "internal_edge": [name(v) for v in e],
                    "other_edge": [name(v) for v in f],
                }
                for clique, (e, f) in self.lt1_violations
            ],
            "lt2_violations": [[name(u), name(v)] for u, v in self.lt2_violations],
        }


def _graph_edges_inside(g: DisplayGraph, clique: frozenset[int]) -> list[tuple[int, int]]:
    members = sorted(clique)
    return [(u, v) for u, v in itertools.combinations(members, 2) if g.graph.has_edge(u, v)]


def _check_base(g: DisplayGraph, tri: Triangulation) -> None:
    if tri.base != g.graph:
        raise PreconditionError("triangulation is over a different graph")
    if not is_chordal(tri.graph):
        raise PreconditionError("base graph plus fill is not chordal")


def check_legal(g: DisplayGraph, tri: Triangulation) -> LegalityReport:
    """LT1 over every maximal clique, LT2 over every fill edge.

    Fill edges inside a single input tree are reported with the LT2 violations.
    """
    _check_base(g, tri)
    report = LegalityReport()
    for clique in maximal_cliques(tri.graph):
        inside = _graph_edges_inside(g, clique)
        internal = [e for e in inside if g.is_internal_edge(*e)]
        if internal and len(inside) > 1:
            e = internal[0]
            f = next(x for x in inside if x != e)
            report.lt1_violations.append((tuple(sorted(clique)), (e, f)))
    for u, v in tri.sorted_fill():
        if g.is_leaf(u) or g.is_leaf(v) or g.info[u].tree == g.info[v].tree:
            report.lt2_violations.append((u, v))
    return report


def check_concise(g: DisplayGraph, tri: Triangulation) -> bool:
    if not check_legal(g, tri):
        raise PreconditionError("conciseness is only defined for legal triangulations")
    cliques = maximal_cliques(tri.graph)
    for u, v in g.internal_edges:
        if sum(1 for c in cliques if u in c and v in c) != 1:
            return False
    for v in g.leaf_vertices():
        if sum(1 for c in cliques if v in c) != 1:
            return False
    return True


def bags_containing(dec: TreeDecomposition, v: int) -> frozenset[int]:
    """N(v): the decomposition nodes whose bag holds ``v``."""
    return dec.nodes_containing(v)


def edge_neighborhood(dec: TreeDecomposition, u: int, v: int) -> frozenset[int]:
    return bags_containing(dec, u) & bags_containing(dec, v)


def _merge_nodes(dec: TreeDecomposition, members: frozenset[int]) -> TreeDecomposition:
    """Contract every tree edge with both ends in ``members`` (a connected node set)."""
    while True:
        inside = [(x, y) for x, y in dec.sorted_tree_edges() if x in members and y in members]
        if not inside:
            return dec
        x, y = inside[0]
        dec, z = dec.contract(x, y)
        members = (members - {x, y}) | {z}


def make_concise(g: DisplayGraph, ct: TreeDecomposition) -> TreeDecomposition:
    """Contract a clique tree of a legal triangulation until it becomes concise.

    First every leaf vertex's node set is merged into one node, then the node
    set shared by the two ends of every display-graph edge.
    """
    tri = triangulation_from_decomposition(g.graph, ct)
    if not check_legal(g, tri):
        raise PreconditionError("make_concise needs a clique tree of a legal triangulation")
    dec = TreeDecomposition(ct.nodes, ct.tree_edges, dict(ct.bags))
    for v in sorted(g.leaf_vertices()):
        where = bags_containing(dec, v)
        if len(where) > 1:
            dec = _merge_nodes(dec, where)
    for u, v in g.graph.sorted_edges():
        where = edge_neighborhood(dec, u, v)
        if len(where) > 1:
            dec = _merge_nodes(dec, where)
    return dec


# ---------------------------------------------------------------------------
# forward construction from a supertree


def decomposition_from_supertree(
    g: DisplayGraph | Profile, supertree: PhyloTree, phis: Sequence[EmbeddingFunction]
) -> TreeDecomposition:
    """Tree decomposition of the display graph built over a supertree.

    Start with one node per supertree vertex holding the images of that vertex
    under every embedding, then subdivide each supertree edge once per
    display-graph edge crossing it, in order of origin tree.
    """
    if isinstance(g, Profile):
        g = build_display_graph(g)
    trees = g.profile.trees
    if len(phis) != len(trees):
        raise InputError(f"expected {len(trees)} embeddings, got {len(phis)}")
    for k, phi in enumerate(phis):
        if phi.target != trees[k] or phi.source != supertree:
            raise InputError(f"embedding {k} does not map the supertree onto tree {k}")
        problems = embedding_violations(phi)
        if problems:
            raise InputError(f"embedding {k} is invalid: {problems[0]}")

    node_of = {v: i for i, v in enumerate(supertree.vertices)}
    bags: dict[int, frozenset[int]] = {}
    for v, x in node_of.items():
        bags[x] = frozenset(
            g.tree_vertex[k][phi.mapping[v]] for k, phi in enumerate(phis) if v in phi.mapping
        )

    edges: set[frozenset[int]] = set()
    nodes = list(range(len(node_of)))
    for a, b in supertree.sorted_edges():
        x, y = node_of[a], node_of[b]
        bx, by = bags[x], bags[y]
        crossing = []
        for p, q in g.graph.sorted_edges():
            forward = p in bx and q in by
            backward = q in bx and p in by
            if forward and backward:
                continue
            if forward:
                crossing.append((g.edge_origin[frozenset((p, q))][0], p, q))
            elif backward:
                crossing.append((g.edge_origin[frozenset((p, q))][0], q, p))
        crossing.sort()
        us = [c[1] for c in crossing]
        vs = [c[2] for c in crossing]
        common = bx & by
        prev = x
        for i in range(len(crossing)):
            z = len(nodes)
            nodes.append(z)
            bags[z] = common | frozenset(vs[: i + 1]) | frozenset(us[i:])
            edges.add(frozenset((prev, z)))
            prev = z
        edges.add(frozenset((prev, y)))
    return TreeDecomposition(tuple(nodes), frozenset(edges), bags)


def property_i_violations(g: DisplayGraph, dec: TreeDecomposition) -> list[int]:
    """Nodes holding an internal edge together with any other display-graph edge."""
    bad = []
    for x in dec.nodes:
        inside = _graph_edges_inside(g, dec.bags[x])
        if any(g.is_internal_edge(*e) for e in inside) and len(inside) > 1:
            bad.append(x)
    return bad


def property_ii_violations(g: DisplayGraph, dec: TreeDecomposition) -> list[tuple[int, int]]:
    """(node, leaf) pairs where the leaf is not adjacent to some bag-mate."""
    bad = []
    for x in dec.nodes:
        bag = dec.bags[x]
        for v in sorted(bag):
            if g.is_leaf(v) and any(u != v and not g.graph.has_edge(u, v) for u in bag):
                bad.append((x, v))
    return bad


def claim1_violations(g: DisplayGraph, dec: TreeDecomposition) -> list[int]:
    """Leaves whose bag union holds two internal vertices of one tree, or a non-neighbour."""
    bad = []
    for v in sorted(g.leaf_vertices()):
        union = frozenset().union(*(dec.bags[x] for x in bags_containing(dec, v)))
        inner = [u for u in union if g.is_internal(u)]
        per_tree: dict[int, int] = {}
        for u in inner:
            per_tree[g.info[u].tree] = per_tree.get(g.info[u].tree, 0) + 1
        if any(c > 1 for c in per_tree.values()) or any(not g.graph.has_edge(u, v) for u in inner):
            bad.append(v)
    return bad


def claim2_violations(g: DisplayGraph, dec: TreeDecomposition) -> list[tuple[int, int]]:
    """Internal edges whose shared-bag union meets another tree twice or its own tree beyond the edge."""
    bad = []
    for u, v in g.internal_edges:
        union = frozenset().union(*(dec.bags[x] for x in edge_neighborhood(dec, u, v)))
        home = g.info[u].tree
        counts: dict[int, int] = {}
        for w in union:
            for k in g.trees_of[w]:
                counts[k] = counts.get(k, 0) + 1
        own = {w for w in union if home in g.trees_of[w]}
        if own != {u, v} or any(c > 1 for k, c in counts.items() if k != home):
            bad.append((u, v))
    return bad


# ---------------------------------------------------------------------------
# search


@dataclass
class SearchOutcome:
    """Result of a legal-triangulation search with bookkeeping for reports."""

    triangulation: Triangulation | None
    candidates: int
    method: str
    examined: int = 0  # subsets tested (enumerate) or DP states expanded (elimination)
    pruned: int = 0  # subsets skipped because they contain an LT1-forbidden set

    @property
    def found(self) -> bool:
        return self.triangulation is not None

    @property
    def total_subsets(self) -> int:
        return 2**self.candidates

    def summary(self) -> str:
        if self.method == "enumerate":
            covered = self.examined + self.pruned
            return f"{covered}/{self.total_subsets} fill subsets exhausted"
        return (
            f"no legal elimination ordering over {self.examined} search states; "
            f"all {self.total_subsets} fill subsets excluded"
        )


class _Instance:
    """Bitmask view of a display graph for fast search."""

    def __init__(self, g: DisplayGraph):
        self.g = g
        self.n = len(g.vertices)
        self.adj = [0] * self.n
        self.iadj = [0] * self.n
        for u, v in g.graph.sorted_edges():
            self.adj[u] |= 1 << v
            self.adj[v] |= 1 << u
            if g.is_internal_edge(u, v):
                self.iadj[u] |= 1 << v
                self.iadj[v] |= 1 << u
        self.candidates = g.candidate_fill_edges()
        self.index = {c: i for i, c in enumerate(self.candidates)}
        self.cand = [0] * self.n
        for u, v in self.candidates:
            self.cand[u] |= 1 << v
            self.cand[v] |= 1 << u
        self.forbidden = self._forbidden_sets()

    def _forbidden_sets(self) -> list[int]:
        """Minimal candidate subsets that complete an LT1-violating clique."""
        out = set()
        edges = self.g.graph.sorted_edges()
        for e in self.g.internal_edges:
            for f in edges:
                if f == e:
                    continue
                verts = sorted(set(e) | set(f))
                need = 0
                ok = True
                for a, b in itertools.combinations(verts, 2):
                    if self.adj[a] >> b & 1:
                        continue
                    i = self.index.get((a, b))
                    if i is None:
                        ok = False
                        break
                    need |= 1 << i
                if ok:
                    out.add(need)
        return sorted(out)

    def chordal_with(self, fill_mask: int) -> bool:
        adj = list(self.adj)
        for i, (u, v) in enumerate(self.candidates):
            if fill_mask >> i & 1:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        return _chordal_masks(adj)


def _chordal_masks(adj: list[int]) -> bool:
    """Maximum cardinality search + perfect elimination check over bitmasks."""
    n = len(adj)
    weight = [0] * n
    numbered = 0
    order = []
    for _ in range(n):
        best, bw = -1, -1
        for v in range(n):
            if not numbered >> v & 1 and weight[v] > bw:
                best, bw = v, weight[v]
        order.append(best)
        numbered |= 1 << best
        rest = adj[best] & ~numbered
        while rest:
            low = rest & -rest
            weight[low.bit_length() - 1] += 1
            rest ^= low
    # visit order reversed is an elimination order; check each vertex's earlier-visited
    # neighbours form a clique, via the latest-visited one of them
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    seen = 0
    for v in order:
        earlier = adj[v] & seen
        if earlier:
            parent = max(_bits(earlier), key=pos.__getitem__)
            if earlier & ~(adj[parent] | (1 << parent)):
                return False
        seen |= 1 << v
    return True


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _enumerate(inst: _Instance) -> SearchOutcome:
    m = len(inst.candidates)
    out = SearchOutcome(None, m, "enumerate")
    for size in range(m + 1):
        for combo in itertools.combinations(range(m), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if any(f & mask == f for f in inst.forbidden):
                out.pruned += 1
                continue
            out.examined += 1
            if inst.chordal_with(mask):
                tri = Triangulation(
                    inst.g.graph, frozenset(frozenset(inst.candidates[i]) for i in combo)
                )
                if check_legal(inst.g, tri):
                    out.triangulation = tri
                    return out
    return out


class _Eliminator:
    """Dynamic programme over sets of eliminated vertices.

    Every fill of a legal triangulation of minimum size is a minimal
    triangulation, hence produced by eliminating vertices in some order where
    each step's clique is LT1-clean and creates only candidate pairs. The
    cost of a step depends only on the eliminated set, so minimum fill and
    constrained feasibility are shortest-path questions over those sets.
    """

    def __init__(self, inst: _Instance, excluded: int = 0, required: Sequence[int] = ()):
        self.inst = inst
        n = inst.n
        self.full = (1 << n) - 1
        self.allowed = list(inst.cand)
        for i, (u, v) in enumerate(inst.candidates):
            if excluded >> i & 1:
                self.allowed[u] &= ~(1 << v)
                self.allowed[v] &= ~(1 << u)
        self.required = [inst.candidates[i] for i in required]
        self.memo: dict[tuple[int, int], float] = {}
        self.states = 0

    def _current(self, s: int) -> list[int]:
        """Adjacency among uneliminated vertices in the partially filled graph."""
        inst = self.inst
        alive = self.full & ~s
        cur = [inst.adj[v] & alive for v in range(inst.n)]
        seen = 0
        for start in _bits(s):
            if seen >> start & 1:
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                nxt = 0
                for w in _bits(frontier):
                    nxt |= inst.adj[w]
                nxt &= s & ~comp
                comp |= nxt
                frontier = nxt
            seen |= comp
            border = 0
            for w in _bits(comp):
                border |= inst.adj[w]
            border &= alive
            for a in _bits(border):
                cur[a] |= border & ~(1 << a)
        return cur

    def _step(self, cur: list[int], v: int):
        """(new pairs as (a, b) list, ok) for eliminating ``v``."""
        inst = self.inst
        nb = cur[v]
        q = nb | (1 << v)
        internal = False
        g_edges = 0
        for w in _bits(q):
            if inst.iadj[w] & q:
                internal = True
            g_edges += bin(inst.adj[w] & q).count("1")
        if internal and g_edges > 2:
            return None
        new = []
        for a in _bits(nb):
            missing = nb & ~cur[a] & ~(1 << a) & ~((1 << (a + 1)) - 1)
            if missing & ~self.allowed[a]:
                return None
            for b in _bits(missing):
                new.append((a, b))
        return new

    def _simplicial(self, cur: list[int], v: int) -> bool:
        nb = cur[v]
        return all(not (nb & ~cur[a] & ~(1 << a)) for a in _bits(nb))

    def solve(self, s: int = 0, rmask: int = 0) -> float:
        if s == self.full:
            return 0 if rmask == (1 << len(self.required)) - 1 else float("inf")
        key = (s, rmask)
        if key in self.memo:
            return self.memo[key]
        self.states += 1
        cur = self._current(s)
        moves = []
        for v in _bits(self.full & ~s):
            step = self._step(cur, v)
            if step is None:
                if self._simplicial(cur, v):
                    # an illegal clique is already present
                    moves = []
                    break
                continue
            if not step:
                # a simplicial vertex can always go first
                moves = [(v, step)]
                break
            moves.append((v, step))
        if not moves:
            self.memo[key] = float("inf")
            return float("inf")
        best = float("inf")
        for v, step in moves:
            r = rmask
            for a, b in step:
                for j, req in enumerate(self.required):
                    if req == (a, b):
                        r |= 1 << j
            best = min(best, len(step) + self.solve(s | (1 << v), r))
        self.memo[key] = best
        return best


def _eliminate(inst: _Instance) -> SearchOutcome:
    m = len(inst.candidates)
    out = SearchOutcome(None, m, "elimination")
    base = _Eliminator(inst)
    best = base.solve()
    out.examined = base.states
    if best == float("inf"):
        return out
    size = int(best)
    chosen: list[int] = []
    last = -1
    for _ in range(size):
        for c in range(last + 1, m):
            excluded = 0
            for j in range(c):
                if j not in chosen:
                    excluded |= 1 << j
            probe = _Eliminator(inst, excluded, chosen + [c])
            cost = probe.solve()
            out.examined += probe.states
            if cost == size:
                chosen.append(c)
                last = c
                break
        else:  # pragma: no cover - the optimum has ``size`` edges
            raise AssertionError("could not extend the lexicographic optimum")
    tri = Triangulation(inst.g.graph, frozenset(frozenset(inst.candidates[i]) for i in chosen))
    out.triangulation = tri
    return out


def search_with_stats(
    g: DisplayGraph, limit: int | None = DEFAULT_LIMIT, method: str = "auto"
) -> SearchOutcome:
    """Find the lexicographically first minimum-size legal fill, with search statistics.

    ``method`` is ``"enumerate"`` (subsets by size, then lexicographically),
    ``"elimination"`` (dynamic programme over elimination orderings, same
    answer) or ``"auto"`` (enumerate up to 12 candidates).
    """
    inst = _Instance(g)
    m = len(inst.candidates)
    if limit is not None and m > limit:
        raise InstanceTooLarge(m, limit)
    if method == "auto":
        method = "enumerate" if m <= 12 else "elimination"
    if method == "enumerate":
        return _enumerate(inst)
    if method == "elimination":
        return _eliminate(inst)
    raise ValueError(f"unknown search method {method!r}")


def search_legal_triangulation(
    g: DisplayGraph, limit: int | None = DEFAULT_LIMIT, method: str = "auto"
) -> Triangulation | None:
    return search_with_stats(g, limit, method).triangulation
