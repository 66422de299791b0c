"""Command-line interface.

Exit codes: 0 compatible / legal, 1 incompatible / illegal, 2 input or resource error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .chordal import TreeDecomposition, Triangulation, is_chordal, validate_decomposition
from .compatibility import decide, random_profile
from .display_graph import build_display_graph, fill_from_names
from .errors import InstanceTooLarge, TreeCompatError
from .legal import DEFAULT_LIMIT, check_concise, check_legal
from .newick import parse_profile, write_profile, write_tree

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _limit(args) -> int:
    if args.limit is not None:
        return args.limit
    env = os.environ.get("TREECOMPAT_LIMIT")
    return int(env) if env else DEFAULT_LIMIT


def _load(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_profile(text)


def _dump(obj, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def cmd_check(args, out) -> int:
    report = decide(_load(args.profile), _limit(args), args.method)
    if args.json:
        _dump(report.to_json(), out)
    elif report.compatible:
        out.write(f"compatible\n{write_tree(report.witness.supertree)}\n")
    else:
        out.write(f"incompatible ({report.certificate.split(': ', 1)[1]})\n")
    return EXIT_OK if report.compatible else EXIT_NO


def cmd_supertree(args, out) -> int:
    report = decide(_load(args.profile), _limit(args), args.method)
    if not report.compatible:
        print(f"error: profile is incompatible ({report.certificate})", file=sys.stderr)
        return EXIT_NO
    text = write_tree(report.witness.supertree) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _whole_decomposition(graph, report) -> TreeDecomposition:
    """Join the component clique trees into one decomposition of the full display graph."""
    nodes, edges, bags = [], set(), {}
    first_nodes = []
    for comp in report.witness.components:
        ct = comp.clique_tree
        offset = len(nodes)
        remap = {x: offset + i for i, x in enumerate(ct.nodes)}
        for x in ct.nodes:
            nodes.append(remap[x])
            bags[remap[x]] = frozenset(graph.resolve(comp.graph.name(v)) for v in ct.bags[x])
        edges |= {frozenset(remap[x] for x in e) for e in ct.tree_edges}
        first_nodes.append(remap[ct.nodes[0]])
    # edges of trees too small to constrain anything
    for u, v in graph.graph.sorted_edges():
        if any(u in b and v in b for b in bags.values()):
            continue
        x = len(nodes)
        nodes.append(x)
        bags[x] = frozenset((u, v))
        host = next((y for y in nodes[:-1] if u in bags[y] or v in bags[y]), None)
        if host is None:
            first_nodes.append(x)
        else:
            edges.add(frozenset((host, x)))
    for a, b in zip(first_nodes, first_nodes[1:]):
        edges.add(frozenset((a, b)))
    return TreeDecomposition(tuple(nodes), frozenset(edges), bags)


def cmd_triangulate(args, out) -> int:
    profile = _load(args.profile)
    graph = build_display_graph(profile)
    if args.emit == "graph":
        _dump(graph.to_json(), out)
        return EXIT_OK
    report = decide(profile, _limit(args), args.method)
    if not report.compatible:
        _dump({"fill": None, "certificate": report.certificate}, out)
        return EXIT_NO
    if args.emit == "fill":
        fill = []
        for comp in report.witness.components:
            fill += comp.triangulation.to_json(comp.graph.name)["fill"]
        _dump({"fill": fill}, out)
        return EXIT_OK
    dec = _whole_decomposition(graph, report)
    assert validate_decomposition(graph.graph, dec)
    _dump(dec.to_json(graph.name), out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    profile = _load(args.profile)
    graph = build_display_graph(profile)
    source = Path(args.fill)
    text = source.read_text(encoding="utf-8") if source.is_file() else args.fill
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"error: fill is neither a file nor JSON ({exc})", file=sys.stderr)
        return EXIT_ERROR
    fill = fill_from_names(graph, data["fill"])
    tri = Triangulation(graph.graph, fill)
    if not is_chordal(tri.graph):
        _dump({"chordal": False, "legal": False, "concise": None}, out)
        return EXIT_NO
    report = check_legal(graph, tri)
    result = {"chordal": True, **report.to_json(graph.name)}
    result["concise"] = check_concise(graph, tri) if report.legal else None
    _dump(result, out)
    return EXIT_OK if report.legal else EXIT_NO


def cmd_gen(args, out) -> int:
    profile = random_profile(args.seed, args.trees, args.taxa, args.overlap, args.universe)
    text = write_profile(profile)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecompat",
        description="Unrooted tree compatibility via legal triangulations of the display graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("profile", help="Newick profile, one tree per line ('-' for stdin)")
        p.add_argument("--limit", type=int, default=None,
                       help=f"max candidate fill edges per component (default {DEFAULT_LIMIT}, env TREECOMPAT_LIMIT)")
        p.add_argument("--method", choices=("auto", "enumerate", "elimination"), default="auto")

    p = sub.add_parser("check", help="decide compatibility")
    solver_flags(p)
    p.add_argument("--json", action="store_true", help="emit the full report as JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("supertree", help="print a supertree displaying every input tree")
    solver_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_supertree)

    p = sub.add_parser("triangulate", help="emit display graph, legal fill or decomposition as JSON")
    solver_flags(p)
    p.add_argument("--emit", choices=("graph", "fill", "decomposition"), required=True)
    p.set_defaults(func=cmd_triangulate)

    p = sub.add_parser("verify", help="check legality and conciseness of a given fill")
    p.add_argument("profile")
    p.add_argument("--fill", required=True, help='JSON file or inline JSON {"fill": [[u, v], ...]}')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a random profile")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trees", type=int, required=True)
    p.add_argument("--taxa", type=int, required=True, help="taxa per tree")
    p.add_argument("--overlap", type=float, required=True, help="fraction of each tree's taxa shared by all trees")
    p.add_argument("--universe", type=int, default=None, help="total taxa to draw from")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (TreeCompatError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
