"""Partial injections and partial p-partitions, the universes they live in,
and restriction of formulas by them.

A partial injection is a set of *atoms*: pairs ``(i, j)`` sending pigeon
``i`` to hole ``j`` and singletons ``(j,)`` marking hole ``j`` as empty.
Pigeons and holes are integers; which side an integer belongs to is fixed
by its position in the atom.  A partial p-partition is a set of disjoint
sorted p-tuples.
"""

from __future__ import annotations

from itertools import combinations

from .formulas import FALSE, TRUE, Const, Formula, Not, Or, Var, simplify

__all__ = [
    "PartialInjection",
    "PartialPartition",
    "InjUniverse",
    "PUniverse",
    "IncompatibleError",
    "compatible",
    "union",
    "subtract",
    "restrict_formula",
    "injection_from_json",
    "injection_to_json",
]


class IncompatibleError(ValueError):
    pass


class PartialInjection:
    """Immutable set of pair atoms ``(i, j)`` and singleton atoms ``(j,)``."""

    __slots__ = ("atoms", "dom", "ran", "_hash")

    def __init__(self, atoms=()):
        atoms = frozenset(tuple(a) for a in atoms)
        dom, ran = set(), set()
        for a in atoms:
            if len(a) == 2:
                if a[0] in dom:
                    raise IncompatibleError(f"pigeon {a[0]} used twice")
                dom.add(a[0])
            elif len(a) != 1:
                raise ValueError(f"bad atom {a!r}")
            if a[-1] in ran:
                raise IncompatibleError(f"hole {a[-1]} used twice")
            ran.add(a[-1])
        self.atoms = atoms
        self.dom = frozenset(dom)
        self.ran = frozenset(ran)
        self._hash = hash(atoms)

    kind = "inj"

    @classmethod
    def of(cls, pairs=(), singles=()):
        return cls([tuple(p) for p in pairs] + [(j,) for j in singles])

    @property
    def pairs(self):
        return sorted(a for a in self.atoms if len(a) == 2)

    @property
    def singles(self):
        return sorted(a[0] for a in self.atoms if len(a) == 1)

    def sorted_atoms(self):
        return self.pairs + [(j,) for j in self.singles]

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.sorted_atoms())

    def __contains__(self, atom):
        return tuple(atom) in self.atoms

    def __eq__(self, other):
        return isinstance(other, PartialInjection) and self.atoms == other.atoms

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        return self.atoms <= other.atoms

    def __repr__(self):
        parts = [f"<{i},{j}>" for i, j in self.pairs] + [f"<{j}>" for j in self.singles]
        return "{" + ", ".join(parts) + "}"

    def atom_ok(self, a) -> bool:
        """True iff adding atom ``a`` keeps this a partial injection."""
        if a in self.atoms:
            return True
        if len(a) == 2 and a[0] in self.dom:
            return False
        return a[-1] not in self.ran

    def compatible(self, other: "PartialInjection") -> bool:
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        seen_dom, seen_ran = set(), set()
        for a in small.atoms:
            if a in big.atoms:
                continue
            if len(a) == 2:
                if a[0] in big.dom or a[0] in seen_dom:
                    return False
                seen_dom.add(a[0])
            if a[-1] in big.ran or a[-1] in seen_ran:
                return False
            seen_ran.add(a[-1])
        return True

    def union(self, other):
        if not self.compatible(other):
            raise IncompatibleError(f"{self} and {other} are incompatible")
        return PartialInjection(self.atoms | other.atoms)

    def add(self, atom):
        return PartialInjection(self.atoms | {tuple(atom)})

    def minus(self, other):
        return PartialInjection(self.atoms - other.atoms)

    def covers(self):
        """Vertices touched, tagged by side."""
        return {("p", i) for i in self.dom} | {("h", j) for j in self.ran}

    def to_json(self):
        return {"pairs": [list(p) for p in self.pairs], "singles": list(self.singles)}


class PartialPartition:
    """Immutable set of pairwise disjoint sorted p-blocks."""

    __slots__ = ("atoms", "p", "covered", "_hash")

    kind = "part"

    def __init__(self, blocks=(), p=None):
        blocks = frozenset(tuple(sorted(b)) for b in blocks)
        covered = set()
        for b in blocks:
            if p is None:
                p = len(b)
            if len(b) != p:
                raise ValueError(f"block {b} is not a {p}-set")
            if covered & set(b):
                raise IncompatibleError(f"block {b} overlaps another block")
            covered |= set(b)
        self.atoms = blocks
        self.p = p
        self.covered = frozenset(covered)
        self._hash = hash(blocks)

    def sorted_atoms(self):
        return sorted(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.sorted_atoms())

    def __contains__(self, block):
        return tuple(sorted(block)) in self.atoms

    def __eq__(self, other):
        return isinstance(other, PartialPartition) and self.atoms == other.atoms

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        return self.atoms <= other.atoms

    def __repr__(self):
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.sorted_atoms()) + "}"

    def atom_ok(self, b) -> bool:
        return b in self.atoms or not (self.covered & set(b))

    def compatible(self, other) -> bool:
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        seen = set()
        for b in small.atoms:
            if b in big.atoms:
                continue
            s = set(b)
            if s & big.covered or s & seen:
                return False
            seen |= s
        return True

    def union(self, other):
        if not self.compatible(other):
            raise IncompatibleError(f"{self} and {other} are incompatible")
        return PartialPartition(self.atoms | other.atoms, self.p or other.p)

    def add(self, block):
        return PartialPartition(self.atoms | {tuple(sorted(block))}, self.p or len(block))

    def minus(self, other):
        return PartialPartition(self.atoms - other.atoms, self.p)

    def covers(self):
        return set(self.covered)

    def to_json(self):
        return {"blocks": [list(b) for b in self.sorted_atoms()]}


class InjUniverse:
    """Pigeon set D and hole set R (disjoint by tagging)."""

    __slots__ = ("pigeons", "holes", "_hash")
    kind = "inj"

    def __init__(self, pigeons, holes):
        self.pigeons = frozenset(pigeons)
        self.holes = frozenset(holes)
        self._hash = hash(("inj", self.pigeons, self.holes))

    @classmethod
    def standard(cls, M, m):
        return cls(range(1, M + 1), range(1, m + 1))

    def __eq__(self, other):
        return isinstance(other, InjUniverse) and self.pigeons == other.pigeons and self.holes == other.holes

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"InjUniverse(D={sorted(self.pigeons)}, R={sorted(self.holes)})"

    @property
    def capacity(self) -> int:
        """|R|, the bound a tree's height plus a restriction must respect."""
        return len(self.holes)

    def empty(self):
        return PartialInjection()

    def edges(self, query):
        kind, v = query
        if kind == "pigeon":
            if v not in self.pigeons:
                raise ValueError(f"pigeon {v} not in universe")
            return [(v, j) for j in sorted(self.holes)]
        if kind == "hole":
            if v not in self.holes:
                raise ValueError(f"hole {v} not in universe")
            return [(i, v) for i in sorted(self.pigeons)] + [(v,)]
        raise ValueError(f"bad query {query!r}")

    def without(self, rho):
        """Universe left after removing the vertices used by ``rho``."""
        return InjUniverse(self.pigeons - rho.dom, self.holes - rho.ran)

    def without_atom(self, a):
        if len(a) == 2:
            return InjUniverse(self.pigeons - {a[0]}, self.holes - {a[1]})
        return InjUniverse(self.pigeons, self.holes - {a[0]})

    def contains_map(self, rho) -> bool:
        return rho.dom <= self.pigeons and rho.ran <= self.holes

    def contains_atom(self, a) -> bool:
        if len(a) == 2:
            return a[0] in self.pigeons and a[1] in self.holes
        return a[0] in self.holes

    def queries_for(self, sigma, lean: bool = False):
        """Queries covering v(sigma), in order: for each atom (sorted), its
        pigeon then its hole.  ``lean`` asks only the pigeon of a pair (the
        answer already decides the pair) and the hole of a singleton."""
        out = []
        for a in sigma.sorted_atoms():
            if len(a) == 2:
                out.append(("pigeon", a[0]))
                if lean:
                    continue
            out.append(("hole", a[-1]))
        return out

    def query_covered(self, query, rho) -> bool:
        kind, v = query
        return v in (rho.dom if kind == "pigeon" else rho.ran)

    def make_map(self, atoms):
        return PartialInjection(atoms)

    def to_json(self):
        return {"kind": "inj", "pigeons": sorted(self.pigeons), "holes": sorted(self.holes)}


class PUniverse:
    """Element set [M] (or any finite set of ints) with block size p."""

    __slots__ = ("elements", "p", "_hash")
    kind = "part"

    def __init__(self, elements, p):
        self.elements = frozenset(elements)
        self.p = int(p)
        self._hash = hash(("part", self.elements, self.p))

    @classmethod
    def standard(cls, M, p):
        return cls(range(1, M + 1), p)

    def __eq__(self, other):
        return isinstance(other, PUniverse) and self.elements == other.elements and self.p == other.p

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PUniverse({sorted(self.elements)}, p={self.p})"

    @property
    def capacity(self) -> int:
        return len(self.elements)

    def empty(self):
        return PartialPartition((), self.p)

    def edges(self, query):
        kind, v = query
        if kind != "elem" or v not in self.elements:
            raise ValueError(f"bad query {query!r} for {self!r}")
        others = sorted(self.elements - {v})
        return [tuple(sorted((v,) + c)) for c in combinations(others, self.p - 1)]

    def without(self, rho):
        return PUniverse(self.elements - rho.covered, self.p)

    def without_atom(self, b):
        return PUniverse(self.elements - set(b), self.p)

    def contains_map(self, rho) -> bool:
        return rho.covered <= self.elements

    def contains_atom(self, b) -> bool:
        return set(b) <= self.elements

    def queries_for(self, sigma, lean: bool = False):
        """Every element of sigma; ``lean`` asks only the least element of
        each block, which decides the block."""
        if lean:
            return [("elem", min(b)) for b in sigma.sorted_atoms()]
        return [("elem", v) for v in sorted(sigma.covered)]

    def query_covered(self, query, rho) -> bool:
        return query[1] in rho.covered

    def make_map(self, atoms):
        return PartialPartition(atoms, self.p)

    def to_json(self):
        return {"kind": "part", "elements": sorted(self.elements), "p": self.p}


def universe_from_json(obj):
    if obj["kind"] == "inj":
        return InjUniverse(obj["pigeons"], obj["holes"])
    return PUniverse(obj["elements"], obj["p"])


def compatible(rho, tau) -> bool:
    """The relation rho || tau: the union is again a partial map."""
    if type(rho) is not type(tau):
        raise TypeError("universe mismatch: cannot compare different map kinds")
    return rho.compatible(tau)


def union(rho, tau):
    return rho.union(tau)


def subtract(tau, rho):
    """tau with the atoms of rho removed; requires tau || rho."""
    if not compatible(tau, rho):
        raise IncompatibleError(f"{tau} and {rho} are incompatible")
    return tau.minus(rho)


def injection_to_json(rho):
    return rho.to_json()


def injection_from_json(obj):
    if "blocks" in obj:
        return PartialPartition(obj["blocks"])
    return PartialInjection.of(obj.get("pairs", ()), obj.get("singles", ()))


def var_atom(v: Var, kind: str):
    """Atom named by an injPHP variable r[i,j] or a Count variable r[{e}]."""
    if kind == "inj":
        if len(v.index) == 2 and all(isinstance(c, int) for c in v.index):
            return tuple(v.index)
    else:
        if len(v.index) == 1 and isinstance(v.index[0], tuple):
            return v.index[0]
    raise ValueError(f"{v.label} is not a {kind} variable")


def restrict_formula(f: Formula, rho, universe=None) -> Formula:
    """The formula f^rho.

    r[i,j] becomes 1 when <i,j> is in rho, 0 when it conflicts with rho and
    stays otherwise (likewise r[{e}] for partitions).  Constants are then
    propagated eagerly.
    """
    kind = rho.kind
    memo = {}

    def go(g):
        r = memo.get(g)
        if r is not None:
            return r
        if isinstance(g, Const):
            r = g
        elif isinstance(g, Var):
            a = var_atom(g, kind)
            if universe is not None and not universe.contains_atom(a):
                raise ValueError(f"variable {g.label} outside universe")
            if a in rho.atoms:
                r = TRUE
            elif not rho.atom_ok(a):
                r = FALSE
            else:
                r = g
        elif isinstance(g, Not):
            r = Not(go(g.child))
        else:
            r = Or(go(c) for c in g.children)
        memo[g] = r
        return r

    return simplify(go(f))
