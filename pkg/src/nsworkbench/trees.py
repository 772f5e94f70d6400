"""Decision trees over partial injections (injPHP-trees) and over partial
p-partitions (p-trees).

One node model serves both: a leaf carries an optional label, a query node
carries a query and one child per admissible edge atom.  The universe of
a child is the parent's universe minus the vertices of the edge taken, so
it is never stored below the root.  Children are ordered as the universe
lists edges: holes ascending under a pigeon query, pigeons ascending and
then the empty-hole singleton under a hole query, blocks lexicographically
under an element query.  Branch lists inherit this order.

A query node may have no children at all (a pigeon query when no hole is
left).  Such dead ends only arise when the height bound of a restriction
is ignored; the ``strict`` switches below turn them into errors, which is
the default.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable

from .partial import (
    InjUniverse,
    PartialInjection,
    PartialPartition,
    PUniverse,
    universe_from_json,
)

__all__ = [
    "Leaf",
    "Node",
    "Tree",
    "HeightError",
    "leaf",
    "query_tree",
    "branches",
    "labeled_branches",
    "br",
    "height",
    "restrict_tree",
    "restrict_labeled",
    "concat",
    "concat_full",
    "represents",
    "tree_from_list",
    "complement",
    "relabel",
    "strip_labels",
    "iter_nodes",
    "validate_tree",
    "random_tree",
    "tree_to_json",
    "tree_from_json",
]


class HeightError(ValueError):
    """Height bound of a restriction or concatenation violated."""


class Leaf:
    __slots__ = ("label",)

    def __init__(self, label=None):
        self.label = label

    def __repr__(self):
        return f"Leaf({self.label!r})"


class Node:
    __slots__ = ("query", "edges", "_height")

    def __init__(self, query, edges):
        self.query = query
        self.edges = tuple(edges)
        self._height = None

    def __repr__(self):
        return f"Node({self.query!r}, {len(self.edges)} edges)"


def _height(node) -> int:
    if isinstance(node, Leaf):
        return 0
    h = node._height
    if h is None:
        h = 1 + max((_height(c) for _, c in node.edges), default=0)
        node._height = h
    return h


class Tree:
    """A (labelled) decision tree together with its universe."""

    __slots__ = ("universe", "root")

    def __init__(self, universe, root):
        self.universe = universe
        self.root = root

    @property
    def kind(self):
        return self.universe.kind

    def __repr__(self):
        return f"Tree({self.universe!r}, height={height(self)}, branches={len(branches(self))})"

    def __eq__(self, other):
        return (isinstance(other, Tree) and self.universe == other.universe
                and _node_eq(self.root, other.root))

    def __hash__(self):
        return hash((self.universe, _node_key(self.root)))


def _node_eq(a, b):
    if isinstance(a, Leaf):
        return isinstance(b, Leaf) and a.label == b.label
    if not isinstance(b, Node) or a.query != b.query or len(a.edges) != len(b.edges):
        return False
    return all(x == y and _node_eq(c, d) for (x, c), (y, d) in zip(a.edges, b.edges))


def _node_key(a):
    if isinstance(a, Leaf):
        return ("L", a.label)
    return ("Q", a.query, tuple((x, _node_key(c)) for x, c in a.edges))


def leaf(universe, label=None) -> Tree:
    return Tree(universe, Leaf(label))


def query_tree(universe, query, labels: Callable | dict | None = None) -> Tree:
    """Height-1 tree asking ``query``; leaf labels from ``labels(atom)``."""
    kids = []
    for a in universe.edges(query):
        lab = labels(a) if callable(labels) else (labels or {}).get(a)
        kids.append((a, Leaf(lab)))
    return Tree(universe, Node(query, kids))


def iter_nodes(T: Tree):
    """Pre-order (path, node) pairs; path is the partial map from the root."""
    empty = T.universe.empty()
    stack = [(empty, T.root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        if isinstance(node, Node):
            for a, c in reversed(node.edges):
                stack.append((path.add(a), c))


def labeled_branches(T: Tree) -> list:
    """[(branch, label)] in left-to-right order."""
    out = []
    for path, node in iter_nodes(T):
        if isinstance(node, Leaf):
            out.append((path, node.label))
    return out


def branches(T: Tree) -> list:
    return [b for b, _ in labeled_branches(T)]


def br(T: Tree, label) -> list:
    """br_s(T): branches whose leaf label is ``label``."""
    return [b for b, lab in labeled_branches(T) if lab == label]


def height(T: Tree) -> int:
    return _height(T.root)


def _restrict_node(node, rho, universe, strict):
    if isinstance(node, Leaf):
        return node
    if universe.query_covered(node.query, rho):
        for a, c in node.edges:
            if a in rho.atoms:
                return _restrict_node(c, rho, universe.without_atom(a), strict)
        raise ValueError(f"restriction {rho} covers query {node.query} but matches no edge")
    kept = []
    for a, c in node.edges:
        if rho.atom_ok(a):
            kept.append((a, _restrict_node(c, rho, universe.without_atom(a), strict)))
    if strict and not kept:
        raise HeightError(f"query {node.query} loses every edge under {rho}")
    return Node(node.query, kept)


def _check_restrict_bound(T, rho):
    U = T.universe
    if U.kind == "inj":
        need = height(T) + len(rho)
        if need > U.capacity:
            raise HeightError(
                f"height {height(T)} + #rho {len(rho)} exceeds |R| = {U.capacity}")
    else:
        need = U.p * (height(T) + len(rho))
        if need > U.capacity:
            raise HeightError(
                f"p*(height {height(T)} + #rho {len(rho)}) exceeds universe size {U.capacity}")


def restrict_labeled(T: Tree, rho, strict: bool = True) -> Tree:
    """T^rho with leaf labels carried along.

    Edges incompatible with rho are deleted and edges in rho are contracted,
    so br(T^rho) = {b minus rho : b in br(T), b || rho}.
    """
    if not T.universe.contains_map(rho):
        raise ValueError(f"restriction {rho} is not over {T.universe}")
    if strict:
        _check_restrict_bound(T, rho)
    root = _restrict_node(T.root, rho, T.universe, strict)
    return Tree(T.universe.without(rho), root)


restrict_tree = restrict_labeled


def _graft(node, path, universe, grafts, combine, strict, used):
    if isinstance(node, Leaf):
        g = grafts.get(path)
        if g is None:
            return node
        used.add(path)
        if g.universe != universe:
            raise ValueError(f"tree grafted at {path} is over {g.universe}, expected {universe}")
        if combine is None:
            return g.root
        return _relabel_node(g.root, lambda lab: combine(node.label, lab))
    kids = []
    for a, c in node.edges:
        kids.append((a, _graft(c, path.add(a), universe.without_atom(a), grafts, combine, strict, used)))
    return Node(node.query, kids)


def concat(T: Tree, grafts: dict, combine: Callable | None = None, strict: bool = True) -> Tree:
    """T * sum_b T_b: graft ``grafts[b]`` at the leaf of each branch b.

    Each grafted tree must be over the universe left after b.  Leaf labels
    come from the grafted tree, or ``combine(outer, inner)`` when given.
    """
    if strict:
        h = height(T)
        for b, g in grafts.items():
            if T.kind == "inj" and height(g) > T.universe.capacity - h:
                raise HeightError(f"grafted tree at {b} is too high")
            if T.kind == "part" and T.universe.p * (height(g) + h) > T.universe.capacity:
                raise HeightError(f"grafted tree at {b} is too high")
    used = set()
    root = _graft(T.root, T.universe.empty(), T.universe, grafts, combine, strict, used)
    missing = set(grafts) - used
    if missing:
        raise ValueError(f"graft keys are not branches of T: {sorted(map(repr, missing))}")
    return Tree(T.universe, root)


def concat_full(T: Tree, U: Tree, combine: Callable | None = None, strict: bool = True) -> Tree:
    """T * U := T * sum_{b in br(T)} U^b."""
    if strict and T.kind == "inj" and height(T) + height(U) > T.universe.capacity:
        raise HeightError("height(T) + height(U) exceeds |R|")
    grafts = {b: restrict_labeled(U, b, strict=False) for b in branches(T)}
    return concat(T, grafts, combine=combine, strict=False)


def represents(T: Tree, F: Iterable) -> bool:
    """Every 1-branch extends some member of F and every 0-branch is
    incompatible with all of F."""
    F = list(F)
    for b, lab in labeled_branches(T):
        if lab == 1:
            if not any(s <= b for s in F):
                return False
        elif lab == 0:
            if any(b.compatible(s) for s in F):
                return False
        else:
            return False
    return True


def _tfl(F, universe, strict, lean):
    if not F:
        return Leaf(0)
    if any(len(s) == 0 for s in F):
        return Leaf(1)
    sigma = next(s for s in F if len(s))
    queries = universe.queries_for(sigma, lean)
    return _ask(queries, F, universe, universe.empty(), strict, lean)


def _ask(queries, F, universe, path, strict, lean):
    for q in queries:
        if not universe.query_covered(q, path):
            break
    else:
        sub = [s.minus(path) for s in F if s.compatible(path)]
        return _tfl(sub, universe, strict, lean)
    edges = universe.edges(q)
    kids = []
    for a in edges:
        kids.append((a, _ask(queries, F, universe.without_atom(a), path.add(a), strict, lean)))
    if strict and not kids:
        raise HeightError(f"query {q} has no remaining edge")
    return Node(q, kids)


def tree_from_list(F: list, universe, strict: bool = True, lean: bool = False) -> Tree:
    """The tree T_F for an ordered list F of partial maps.

    Empty F gives the 0-leaf, a list containing the empty map gives the
    1-leaf; otherwise the first nonempty member's vertices are all queried
    (in order, skipping those already answered) and the construction
    recurses on {sigma minus b : sigma || b} below each branch b.

    With ``lean`` only the queries that decide sigma are asked (the pigeon
    of each pair, the least element of each block); the tree still
    represents F.
    """
    F = list(F)
    for s in F:
        if not universe.contains_map(s):
            raise ValueError(f"{s} is not over {universe}")
    return Tree(universe, _tfl(F, universe, strict, lean))


def _relabel_node(node, fn):
    if isinstance(node, Leaf):
        return Leaf(fn(node.label))
    return Node(node.query, [(a, _relabel_node(c, fn)) for a, c in node.edges])


def complement(T: Tree) -> Tree:
    """Swap labels 0 and 1."""
    def flip(lab):
        if lab not in (0, 1):
            raise ValueError(f"complement needs 0/1 labels, got {lab!r}")
        return 1 - lab
    return Tree(T.universe, _relabel_node(T.root, flip))


def relabel(T: Tree, fn: Callable) -> Tree:
    """Relabel each leaf by ``fn(branch, label)``."""
    def go(node, path):
        if isinstance(node, Leaf):
            return Leaf(fn(path, node.label))
        return Node(node.query, [(a, go(c, path.add(a))) for a, c in node.edges])
    return Tree(T.universe, go(T.root, T.universe.empty()))


def strip_labels(T: Tree) -> Tree:
    return Tree(T.universe, _relabel_node(T.root, lambda lab: None))


def validate_tree(T: Tree) -> None:
    """Raise ValueError unless every query node has exactly the edges its
    universe admits, in canonical order."""
    # child universes shrink, so an answered query is no longer in the universe
    def go2(node, universe):
        if isinstance(node, Leaf):
            return
        q = node.query
        if q[0] == "pigeon":
            ok = q[1] in universe.pigeons
        elif q[0] == "hole":
            ok = q[1] in universe.holes
        else:
            ok = q[1] in universe.elements
        if not ok:
            raise ValueError(f"query {q} already answered or outside universe")
        want = universe.edges(q)
        got = [a for a, _ in node.edges]
        if got != want:
            raise ValueError(f"query {q}: edges {got} != {want}")
        for a, c in node.edges:
            go2(c, universe.without_atom(a))
    go2(T.root, T.universe)


def _queries(universe):
    if universe.kind == "inj":
        return [("pigeon", i) for i in sorted(universe.pigeons)] + \
               [("hole", j) for j in sorted(universe.holes)]
    return [("elem", v) for v in sorted(universe.elements)]


def random_tree(universe, max_height: int, rng: random.Random | None = None,
                leaf_prob: float = 0.3, labels=(0, 1)) -> Tree:
    """Random tree of height at most ``max_height`` with no dead ends."""
    rng = rng or random.Random()

    def go(U, h):
        if h == 0 or rng.random() < leaf_prob:
            return Leaf(rng.choice(labels) if labels else None)
        qs = [q for q in _queries(U) if U.edges(q)]
        if U.kind == "inj":
            qs = [q for q in qs if q[0] == "hole" or U.holes]
        if not qs:
            return Leaf(rng.choice(labels) if labels else None)
        q = rng.choice(qs)
        return Node(q, [(a, go(U.without_atom(a), h - 1)) for a in U.edges(q)])

    return Tree(universe, go(universe, max_height))


def _atom_json(a):
    return list(a)


def _node_to_json(node):
    if isinstance(node, Leaf):
        return {"leafLabel": node.label}
    kind, v = node.query
    key = {"pigeon": "pigeon", "hole": "hole", "elem": "element"}[kind]
    return {"query": {key: v},
            "edges": [{"label": _atom_json(a), "child": _node_to_json(c)} for a, c in node.edges]}


def tree_to_json(T: Tree):
    return {"universe": T.universe.to_json(), "root": _node_to_json(T.root)}


def _label_from_json(x):
    if isinstance(x, list):
        return tuple(_label_from_json(y) for y in x)
    return x


def _node_from_json(obj, kind):
    if "leafLabel" in obj:
        return Leaf(_label_from_json(obj["leafLabel"]))
    (key, v), = obj["query"].items()
    q = ({"pigeon": "pigeon", "hole": "hole", "element": "elem"}[key], v)
    edges = []
    for e in obj["edges"]:
        a = tuple(e["label"])
        edges.append((a, _node_from_json(e["child"], kind)))
    return Node(q, edges)


def tree_from_json(obj) -> Tree:
    U = universe_from_json(obj["universe"])
    return Tree(U, _node_from_json(obj["root"], U.kind))
