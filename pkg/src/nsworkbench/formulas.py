"""Propositional formulas built from constants, variables, negation and
unbounded disjunction.

Conjunction and implication are abbreviations: ``big_and(xs)`` is
``Not(Or(neg(x) for x in xs))`` where ``neg`` cancels a leading negation,
so the conjunction of negated formulas is literally the negation of the
disjunction of the formulas.  Formulas are immutable and compared
structurally; the hash is computed once at construction.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

__all__ = [
    "Formula",
    "Const",
    "Var",
    "Not",
    "Or",
    "TRUE",
    "FALSE",
    "var",
    "neg",
    "big_or",
    "big_and",
    "implies",
    "iff",
    "eval_formula",
    "substitute",
    "simplify",
    "subformulas",
    "depth",
    "format_index",
    "parse_var_name",
    "formula_to_json",
    "formula_from_json",
]


class Formula:
    __slots__ = ("_hash", "_vars")

    def variables(self) -> frozenset:
        v = self._vars
        if v is None:
            v = self._collect_vars()
            object.__setattr__(self, "_vars", v)
        return v

    def __hash__(self):
        return self._hash

    def __setattr__(self, key, value):
        raise AttributeError("formulas are immutable")

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: int):
        if value not in (0, 1):
            raise ValueError(f"constant must be 0 or 1, got {value!r}")
        object.__setattr__(self, "value", int(value))
        object.__setattr__(self, "_hash", hash(("const", int(value))))
        object.__setattr__(self, "_vars", frozenset())

    def _collect_vars(self):
        return frozenset()

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        return isinstance(other, Const) and other.value == self.value

    def __repr__(self):
        return str(self.value)

    def __reduce__(self):
        return (Const, (self.value,))


def format_index(index: tuple) -> str:
    parts = []
    for c in index:
        if isinstance(c, tuple):
            parts.append("{" + ",".join(str(x) for x in c) + "}")
        else:
            parts.append(str(c))
    return ",".join(parts)


class Var(Formula):
    """A propositional variable ``name[index]``.

    Index components are ints or sorted tuples of ints (p-subsets).
    """

    __slots__ = ("name", "index")

    def __init__(self, name: str, index: tuple = ()):
        index = tuple(tuple(c) if isinstance(c, (tuple, list, frozenset, set)) else int(c)
                      for c in index)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "_hash", hash(("var", name, index)))
        object.__setattr__(self, "_vars", None)

    def _collect_vars(self):
        return frozenset((self,))

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        return (isinstance(other, Var) and other._hash == self._hash
                and other.name == self.name and other.index == self.index)

    @property
    def label(self) -> str:
        return f"{self.name}[{format_index(self.index)}]"

    def __repr__(self):
        return self.label

    def __reduce__(self):
        return (Var, (self.name, self.index))


class Not(Formula):
    __slots__ = ("child",)

    def __init__(self, child: Formula):
        object.__setattr__(self, "child", child)
        object.__setattr__(self, "_hash", hash(("not", child._hash)))
        object.__setattr__(self, "_vars", None)

    def _collect_vars(self):
        return self.child.variables()

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Not) and other._hash == self._hash and other.child == self.child

    def __repr__(self):
        return f"~{self.child!r}"

    def __reduce__(self):
        return (Not, (self.child,))


class Or(Formula):
    __slots__ = ("children",)

    def __init__(self, children: Iterable[Formula]):
        children = tuple(children)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "_hash", hash(("or",) + tuple(c._hash for c in children)))
        object.__setattr__(self, "_vars", None)

    def _collect_vars(self):
        out = set()
        for c in self.children:
            out |= c.variables()
        return frozenset(out)

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Or) and other._hash == self._hash and other.children == self.children

    def __repr__(self):
        return "(" + " | ".join(repr(c) for c in self.children) + ")"

    def __reduce__(self):
        return (Or, (self.children,))


TRUE = Const(1)
FALSE = Const(0)


def sort_key(f: Formula):
    if isinstance(f, Const):
        return (0, f.value)
    if isinstance(f, Var):
        return (1, f.label)
    return (2, repr(f))


def var(name: str, *index) -> Var:
    return Var(name, index)


def neg(f: Formula) -> Formula:
    """Negation that cancels a leading negation (used inside big_and)."""
    if isinstance(f, Not):
        return f.child
    return Not(f)


def big_or(items: Iterable[Formula]) -> Or:
    return Or(items)


def big_and(items: Iterable[Formula]) -> Not:
    return Not(Or(neg(x) for x in items))


def implies(a: Formula, b: Formula) -> Or:
    return Or((neg(a), b))


def iff(a: Formula, b: Formula) -> Formula:
    return big_and([implies(a, b), implies(b, a)])


def eval_formula(f: Formula, a: Mapping) -> int:
    """Evaluate ``f`` under the assignment ``a`` (Var -> 0/1)."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Var):
        try:
            return 1 if a[f] else 0
        except KeyError:
            raise KeyError(f"unassigned variable {f.label}") from None
    if isinstance(f, Not):
        return 1 - eval_formula(f.child, a)
    for c in f.children:
        if eval_formula(c, a):
            return 1
    return 0


def eval_partial(f: Formula, a: Mapping):
    """Three-valued evaluation: returns 0, 1 or None when undetermined."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Var):
        v = a.get(f)
        return None if v is None else (1 if v else 0)
    if isinstance(f, Not):
        v = eval_partial(f.child, a)
        return None if v is None else 1 - v
    unknown = False
    for c in f.children:
        v = eval_partial(c, a)
        if v == 1:
            return 1
        if v is None:
            unknown = True
    return None if unknown else 0


def simplify(f: Formula) -> Formula:
    """Eager constant propagation through negation and disjunction.

    Constants never survive under an Or with siblings; an Or of only
    false children collapses to 0.
    """
    if isinstance(f, (Const, Var)):
        return f
    if isinstance(f, Not):
        c = simplify(f.child)
        if isinstance(c, Const):
            return Const(1 - c.value)
        return f if c is f.child else Not(c)
    kids = []
    changed = False
    for c in f.children:
        s = simplify(c)
        if s is not c:
            changed = True
        if isinstance(s, Const):
            changed = True
            if s.value == 1:
                return TRUE
            continue
        kids.append(s)
    if not kids:
        return FALSE
    return Or(kids) if changed else f


def substitute(f: Formula, mapping: Mapping, *, partial: bool = False) -> Formula:
    """Simultaneous substitution of formulas for variables.

    Every variable of ``f`` must be mapped unless ``partial`` is set.
    """
    memo = {}

    def go(g):
        r = memo.get(g)
        if r is not None:
            return r
        if isinstance(g, Const):
            r = g
        elif isinstance(g, Var):
            if g in mapping:
                r = mapping[g]
            elif partial:
                r = g
            else:
                raise KeyError(f"no substitution for {g.label}")
        elif isinstance(g, Not):
            r = Not(go(g.child))
        else:
            r = Or(go(c) for c in g.children)
        memo[g] = r
        return r

    return go(f)


def subformulas(f: Formula) -> list:
    """All subformulas of ``f`` in post-order, without repetition."""
    seen = set()
    out = []
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if done:
            if g not in seen:
                seen.add(g)
                out.append(g)
            continue
        if g in seen:
            continue
        stack.append((g, True))
        if isinstance(g, Not):
            stack.append((g.child, False))
        elif isinstance(g, Or):
            for c in reversed(g.children):
                stack.append((c, False))
    return out


def depth(f: Formula) -> int:
    if isinstance(f, (Const, Var)):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.child)
    return 1 + max((depth(c) for c in f.children), default=0)


_NAME_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\[(.*)\]$")


def parse_var_name(text: str) -> Var:
    """Parse ``r[1,2]`` / ``r[{1,3}]`` / ``p[2,{1,3}]`` into a Var."""
    m = _NAME_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad variable name {text!r}")
    name, body = m.group(1), m.group(2)
    index = []
    i = 0
    body = body.replace(" ", "")
    while i < len(body):
        if body[i] == "{":
            k = body.index("}", i)
            inner = body[i + 1:k]
            index.append(tuple(int(x) for x in inner.split(",")) if inner else ())
            i = k + 1
        else:
            k = body.find(",", i)
            k = len(body) if k < 0 else k
            index.append(int(body[i:k]))
            i = k
        if i < len(body):
            if body[i] != ",":
                raise ValueError(f"bad variable name {text!r}")
            i += 1
    return Var(name, tuple(index))


def formula_to_json(f: Formula):
    """JSON-ready nested dicts.  Disjunct order is preserved because it
    drives the ordered tree construction downstream."""
    if isinstance(f, Const):
        return {"kind": "const", "value": f.value}
    if isinstance(f, Var):
        return {"kind": "var", "name": f.label}
    if isinstance(f, Not):
        return {"kind": "not", "child": formula_to_json(f.child)}
    return {"kind": "or", "children": [formula_to_json(c) for c in f.children]}


def formula_from_json(obj) -> Formula:
    kind = obj["kind"]
    if kind == "const":
        return Const(obj["value"])
    if kind == "var":
        return parse_var_name(obj["name"])
    if kind == "not":
        return Not(formula_from_json(obj["child"]))
    if kind == "or":
        return Or(formula_from_json(c) for c in obj["children"])
    raise ValueError(f"unknown formula kind {kind!r}")
