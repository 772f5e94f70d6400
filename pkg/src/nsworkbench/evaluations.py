"""k-evaluations: maps from formulas to {0,1}-labelled trees.

An evaluation sends each formula of a subformula-closed set to a tree over
one universe (injPHP-trees for r[i,j] variables, p-trees for r[{e}]
variables).  Formulas are identified after constant propagation.  An
evaluation may carry a restriction ``rho``: its trees are then the
restrictions of the original trees, while the keys stay the original
formulas, so the variable condition is checked relative to ``rho``.

T |= phi means every branch of T_phi is labelled 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .formulas import (
    Const,
    Formula,
    Not,
    Or,
    Var,
    formula_from_json,
    formula_to_json,
    simplify,
    subformulas,
)
from .partial import injection_from_json, universe_from_json, var_atom
from .trees import (
    HeightError,
    Leaf,
    Node,
    Tree,
    br,
    branches,
    complement,
    height,
    labeled_branches,
    leaf,
    represents,
    restrict_labeled,
    tree_from_json,
    tree_from_list,
    tree_to_json,
)

__all__ = [
    "DomainError",
    "Evaluation",
    "build_evaluation",
    "variable_tree",
    "check_evaluation",
    "models",
    "ProofLine",
    "FregeProof",
    "audit_proof",
    "normalize_instance",
    "evaluation_to_json",
    "evaluation_from_json",
    "proof_to_json",
    "proof_from_json",
]


class DomainError(KeyError):
    """A formula has no tree in the evaluation."""


@dataclass
class Evaluation:
    universe: object
    trees: dict  # simplified Formula -> Tree
    k: int
    rho: object = None
    order: list = field(default_factory=list)  # keys in insertion (post-) order

    def __post_init__(self):
        if self.rho is None:
            self.rho = self.universe.empty()
        if not self.order:
            self.order = list(self.trees)

    def key(self, f: Formula) -> Formula:
        return simplify(f)

    def tree(self, f: Formula) -> Tree:
        g = self.key(f)
        try:
            return self.trees[g]
        except KeyError:
            if isinstance(g, Const):
                # the constant trees are forced, whether or not listed
                return leaf(self.universe, g.value)
            raise DomainError(f"formula not in the evaluation's domain: {f!r}") from None

    __getitem__ = tree

    def __contains__(self, f):
        return self.key(f) in self.trees

    def __len__(self):
        return len(self.trees)

    def domain(self) -> list:
        return list(self.order)

    @property
    def base_universe(self):
        """Universe before restriction."""
        U = self.universe
        if self.rho is None or not len(self.rho):
            return U
        if U.kind == "inj":
            from .partial import InjUniverse
            return InjUniverse(U.pigeons | self.rho.dom, U.holes | self.rho.ran)
        from .partial import PUniverse
        return PUniverse(U.elements | self.rho.covered, U.p)


def variable_tree(v: Var, universe) -> Tree:
    """The height-1 tree of a variable: ask pigeon i for r[i,j], ask the
    least element of e for r[{e}]; label 1 exactly on the variable's atom."""
    a = var_atom(v, universe.kind)
    q = ("pigeon", a[0]) if universe.kind == "inj" else ("elem", min(a))
    kids = [(b, Leaf(1 if b == a else 0)) for b in universe.edges(q)]
    return Tree(universe, Node(q, kids))


def _or_family(children, trees):
    F = []
    for c in children:
        F.extend(br(trees[c], 1))
    return F


def build_evaluation(formulas, universe, *, k: int | None = None, overrides: dict | None = None,
                     strict: bool = False, lean: bool = True) -> Evaluation:
    """Evaluation of the subformula closure of ``formulas``.

    Constants get height-0 trees, variables their height-1 trees, negations
    the complement and a disjunction the tree T_F of the list of 1-branches
    of its disjuncts (in order), which represents that family; ``lean``
    selects the variant of T_F asking only deciding queries.  ``overrides``
    maps formulas to trees used instead of the default (checked later by
    check_evaluation).  ``k`` defaults to the largest height.
    """
    overrides = {simplify(f): t for f, t in (overrides or {}).items()}
    trees = {}
    order = []
    for f in formulas:
        for g in subformulas(simplify(f)):
            if g in trees:
                continue
            if g in overrides:
                T = overrides[g]
            elif isinstance(g, Const):
                T = leaf(universe, g.value)
            elif isinstance(g, Var):
                T = variable_tree(g, universe)
            elif isinstance(g, Not):
                T = complement(trees[g.child])
            else:
                T = tree_from_list(_or_family(g.children, trees), universe, strict=strict, lean=lean)
            trees[g] = T
            order.append(g)
    if k is None:
        k = max((height(T) for T in trees.values()), default=0)
    return Evaluation(universe, trees, k, order=order)


def models(ev: Evaluation, f: Formula) -> bool:
    """T |= f: every branch of T_f is labelled 1."""
    return all(lab == 1 for _, lab in labeled_branches(ev.tree(f)))


def _restricted_var_tree(v, ev):
    rho = ev.rho
    a = var_atom(v, rho.kind)
    if a in rho.atoms:
        return leaf(ev.universe, 1)
    if not rho.atom_ok(a):
        return leaf(ev.universe, 0)
    base = variable_tree(v, ev.base_universe)
    return restrict_labeled(base, rho, strict=False)


def check_evaluation(ev: Evaluation) -> dict:
    """Check the six conditions; returns {"ok", "failures": {n: [...]}}.

    1: labels in {0,1}, trees over the evaluation's universe, height <= k;
    2, 3: constants; 4: variables (relative to rho); 5: negation is the
    complement; 6: a disjunction represents the union of the 1-branches of
    its disjuncts.  Subformula closure is checked as part of 5 and 6.
    """
    fails = {n: [] for n in range(1, 7)}
    for g in ev.order:
        T = ev.trees[g]
        labs = {lab for _, lab in labeled_branches(T)}
        if not labs <= {0, 1} or T.universe != ev.universe or height(T) > ev.k:
            fails[1].append(g)
        if isinstance(g, Const):
            want = leaf(ev.universe, g.value)
            if T != want:
                fails[2 if g.value == 0 else 3].append(g)
        elif isinstance(g, Var):
            if T != _restricted_var_tree(g, ev):
                fails[4].append(g)
        elif isinstance(g, Not):
            c = ev.trees.get(g.child)
            if c is None or any(l not in (0, 1) for _, l in labeled_branches(c)) \
                    or T != complement(c):
                fails[5].append(g)
        else:
            kids = [ev.trees.get(c) for c in g.children]
            if any(t is None for t in kids):
                fails[6].append(g)
                continue
            F = [b for t in kids for b in br(t, 1)]
            if not represents(T, F):
                fails[6].append(g)
    return {"ok": not any(fails.values()), "failures": fails}


# -- proofs ---------------------------------------------------------------------

@dataclass
class ProofLine:
    formula: Formula
    just: dict  # {"axiom": {...}} | {"rule": {"name", "premises"}} | {"logical": name}

    @property
    def kind(self):
        (k,) = self.just.keys()
        return k


@dataclass
class FregeProof:
    lines: list

    def __post_init__(self):
        for n, ln in enumerate(self.lines):
            if ln.kind == "rule":
                for q in ln.just["rule"].get("premises", []):
                    if not 0 <= q < n:
                        raise ValueError(f"line {n}: premise {q} does not precede it")

    @property
    def target(self):
        return self.lines[-1].formula

    def formulas(self):
        return [ln.formula for ln in self.lines]


def audit_proof(proof: FregeProof, ev: Evaluation) -> list:
    """Indices of the lines l with T not|= l (rule-agnostic)."""
    for ln in proof.lines:
        if ln.formula not in ev:
            raise DomainError(f"proof line not in the evaluation's domain: {ln.formula!r}")
    return [n for n, ln in enumerate(proof.lines) if not models(ev, ln.formula)]


def normalize_instance(I: Formula, ev: Evaluation, *, strict: bool = True):
    """Restrict by the first 0-branch rho of T_I so that T'_I is all-0.

    Returns (rho, ev') where ev' has every tree restricted by rho and the
    cumulative restriction recorded.  In strict mode the height bound of a
    restriction (k + #rho within the universe) is enforced.
    """
    T = ev.tree(I)
    zeros = br(T, 0)
    if not zeros:
        raise ValueError("T_I has no 0-branch: the instance is not falsified")
    rho = zeros[0]
    if strict:
        U = ev.universe
        need = (ev.k + len(rho)) * (U.p if U.kind == "part" else 1)
        if need > U.capacity:
            raise HeightError(f"k + #rho exceeds the universe ({need} > {U.capacity})")
    trees = {g: restrict_labeled(t, rho, strict=False) for g, t in ev.trees.items()}
    new = Evaluation(ev.universe.without(rho), trees, ev.k, ev.rho.union(rho), order=list(ev.order))
    return rho, new


# -- JSON ---------------------------------------------------------------------------

def evaluation_to_json(ev: Evaluation) -> dict:
    return {
        "universe": ev.universe.to_json(),
        "k": ev.k,
        "rho": ev.rho.to_json(),
        "entries": [{"formula": formula_to_json(g), "tree": tree_to_json(ev.trees[g])}
                    for g in ev.order],
    }


def evaluation_from_json(obj) -> Evaluation:
    U = universe_from_json(obj["universe"])
    trees, order = {}, []
    for e in obj["entries"]:
        g = formula_from_json(e["formula"])
        trees[g] = tree_from_json(e["tree"])
        order.append(g)
    rho = injection_from_json(obj["rho"])
    if U.kind == "part":
        from .partial import PartialPartition
        rho = PartialPartition(rho.atoms, U.p)
    return Evaluation(U, trees, obj["k"], rho, order=order)


def proof_to_json(proof: FregeProof) -> list:
    return [{"formula": formula_to_json(ln.formula), "just": ln.just} for ln in proof.lines]


def proof_from_json(obj) -> FregeProof:
    return FregeProof([ProofLine(formula_from_json(r["formula"]), r["just"]) for r in obj])


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
