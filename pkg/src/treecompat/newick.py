"""Newick reading and writing.

Format notes:

* one tree per string, ``;`` terminator mandatory;
* branch lengths (``:0.12``) and bracket comments (``[...]``) are skipped;
* unquoted underscores stand for spaces; quoted labels use ``'...'`` with ``''``
  as the escaped quote;
* names on internal nodes are not labels. When unique they become the vertex
  identifier, so fills can refer to them (``((a,b)u,(c,d)v);``);
* the parse is unrooted: a degree-2 root and any other unlabelled degree-2
  vertex is suppressed.

Profile files hold one tree per line; blank lines and lines starting with ``#``
are ignored.
"""

from __future__ import annotations

import re

from .errors import InputError
from .trees import PhyloTree, Profile, restrict

_SPECIAL = set("()[]':;,")
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class NewickError(InputError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class _Node:
    __slots__ = ("name", "children")

    def __init__(self) -> None:
        self.name = ""
        self.children: list[_Node] = []


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def skip(self) -> None:
        t = self.text
        while self.i < len(t):
            c = t[self.i]
            if c.isspace():
                self.i += 1
            elif c == "[":
                end = t.find("]", self.i)
                if end < 0:
                    raise NewickError("unterminated comment", self.i)
                self.i = end + 1
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, c: str) -> None:
        if self.peek() != c:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise NewickError(f"expected {c!r}, found {found}", self.i)
        self.i += 1

    def name(self) -> str:
        c = self.peek()
        t = self.text
        if c == "'":
            start = self.i
            self.i += 1
            out = []
            while True:
                if self.i >= len(t):
                    raise NewickError("unterminated quoted label", start)
                if t[self.i] == "'":
                    if t[self.i + 1 : self.i + 2] == "'":
                        out.append("'")
                        self.i += 2
                        continue
                    self.i += 1
                    return "".join(out)
                out.append(t[self.i])
                self.i += 1
        start = self.i
        while self.i < len(t) and t[self.i] not in _SPECIAL and not t[self.i].isspace():
            self.i += 1
        return t[start : self.i].replace("_", " ")

    def length(self) -> None:
        if self.peek() == ":":
            self.i += 1
            self.skip()
            m = _NUMBER.match(self.text, self.i)
            if not m:
                raise NewickError("malformed branch length", self.i)
            self.i = m.end()

    def subtree(self) -> _Node:
        node = _Node()
        if self.peek() == "(":
            self.i += 1
            node.children.append(self.subtree())
            while self.peek() == ",":
                self.i += 1
                node.children.append(self.subtree())
            self.expect(")")
        pos = self.i
        node.name = self.name()
        if not node.children and not node.name:
            raise NewickError("empty leaf name", pos)
        self.length()
        return node

    def tree(self) -> _Node:
        root = self.subtree()
        self.expect(";")
        if self.peek():
            raise NewickError("trailing characters after ';'", self.i)
        return root


def parse_tree(text: str) -> PhyloTree:
    """Parse one Newick tree into a normalized :class:`PhyloTree`."""
    root = _Parser(text).tree()

    nodes: list[_Node] = []
    stack = [root]
    while stack:
        n = stack.pop()
        nodes.append(n)
        stack.extend(reversed(n.children))

    leaves = [n for n in nodes if not n.children]
    labels = [n.name for n in leaves]
    seen: set[str] = set()
    for lab in labels:
        if lab in seen:
            raise NewickError(f"duplicate leaf label {lab!r}")
        seen.add(lab)

    if len(root.children) == 1:
        if root.name and not root.children[0].children:
            if root.name in seen:
                raise NewickError(f"duplicate leaf label {root.name!r}")
            a, b = root.children[0].name, root.name
            return PhyloTree((a, b), frozenset({frozenset((a, b))}), {a: a, b: b})
        raise NewickError("root of degree 1 does not form a tree")

    # internal names become identifiers only when unambiguous
    inner = [n for n in nodes if n.children]
    counts: dict[str, int] = {}
    for n in inner:
        if n.name:
            counts[n.name] = counts.get(n.name, 0) + 1
    used = set(seen) | set(counts)
    ids: dict[int, str] = {}
    fresh = 0
    for n in nodes:
        if not n.children:
            ids[id(n)] = n.name
        elif n.name and counts[n.name] == 1 and n.name not in seen:
            ids[id(n)] = n.name
        else:
            while f"v{fresh}" in used:
                fresh += 1
            ids[id(n)] = f"v{fresh}"
            used.add(ids[id(n)])

    if len(nodes) == 1:
        return PhyloTree((root.name,), frozenset(), {root.name: root.name})
    edges = [(ids[id(n)], ids[id(c)]) for n in nodes for c in n.children]
    raw = PhyloTree.from_edges(edges, {lab: lab for lab in labels}, [ids[id(n)] for n in nodes])
    return restrict(raw, raw.leaf_labels)


def _format_label(label: str) -> str:
    if " " in label and "_" not in label and not (_SPECIAL & set(label)):
        if not any(c.isspace() and c != " " for c in label):
            return label.replace(" ", "_")
    if _SPECIAL & set(label) or "_" in label or any(c.isspace() for c in label):
        return "'" + label.replace("'", "''") + "'"
    return label


def write_tree(tree: PhyloTree) -> str:
    """Deterministic Newick text; children sorted by their smallest label.

    The tree is hung from the neighbour of the largest label, so a quartet
    ab|cd is written ``((a,b),c,d);``.
    """
    if len(tree.vertices) == 1:
        return _format_label(tree.labels[tree.vertices[0]]) + ";"
    adj = tree.adjacency
    if not tree.labels:
        raise InputError("cannot write a tree without labels")
    anchor = tree.vertex_of[max(tree.leaf_labels)]
    root = adj[anchor][0]
    if root in tree.labels:
        # two-vertex tree
        a, b = sorted(tree.leaf_labels)
        return f"({_format_label(a)},{_format_label(b)});"

    def rec(v: str, parent: str | None) -> tuple[str, str]:
        if v in tree.labels and parent is not None:
            lab = tree.labels[v]
            return lab, _format_label(lab)
        parts = sorted(rec(w, v) for w in adj[v] if w != parent)
        if not parts:
            return "￿", "()"
        return parts[0][0], "(" + ",".join(p[1] for p in parts) + ")"

    return rec(root, None)[1] + ";"


def parse_profile(text: str) -> Profile:
    """Parse a profile file; every bad line is reported with its line number."""
    trees = []
    errors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            trees.append(parse_tree(stripped))
        except InputError as exc:
            errors.append(f"line {lineno}: {exc}")
    if errors:
        raise InputError("; ".join(errors))
    if not trees:
        raise InputError("profile contains no trees")
    return Profile(tuple(trees))


def write_profile(profile: Profile) -> str:
    return "".join(write_tree(t) + "\n" for t in profile.trees)
