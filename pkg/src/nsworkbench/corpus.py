"""Handcrafted falsified instances with their evaluations.

Each case bundles an evaluation with either a one-axiom proof (UCP) or a
substitution instance (oddtown, FIE).  ``build_*`` construct the cases;
``freeze`` writes them under ``data/corpus`` and ``load`` reads them back,
so tests and the CLI run on the frozen files.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path

from .compilers import instance_from_axiom, subst_instance, ucp_parts
from .evaluations import (
    FregeProof,
    ProofLine,
    build_evaluation,
    evaluation_from_json,
    evaluation_to_json,
    variable_tree,
    proof_from_json,
    proof_to_json,
)
from .formulas import FALSE, Const, Not, Or, Var, big_or, formula_to_json, simplify, var
from .partial import InjUniverse, PUniverse
from .principles import generate
from .trees import br, complement, labeled_branches, query_tree

__all__ = ["CORPUS_DIR", "build_ucp_case", "build_oddtown_case", "build_fie_case",
           "FIE_S", "FIE_RR", "UCP_CASES", "build_all", "freeze", "load", "names"]

CORPUS_DIR = Path(__file__).parent / "data" / "corpus"


def _ucp_psi(M, l, d, k, perm):
    """r[i,1,e] is "pigeon e sits in hole i" for e <= M; gadget element
    M + (i-1)(d-1) + (j-1) of row i is "some pigeon sits in hole i"."""
    psi = {}
    for i in range(1, l + 1):
        for j in range(1, d + 1):
            for e in range(1, k + 1):
                if j == 1:
                    f = var("r", e, i) if e <= M else FALSE
                else:
                    g = M + (i - 1) * (d - 1) + (j - 1)
                    f = big_or(var("r", p, i) for p in range(1, M + 1)) if e == g else FALSE
                psi[i, j, perm[e - 1]] = f
    return psi


def build_ucp_case(M: int, l: int, d: int, perm=None):
    """Falsified UCP^{l,d}_k instance over (D_M, R_l) with k = M + l(d-1).

    ``perm`` relabels the elements of [k].  The proof is the axiom line
    followed by injPHP^M_l as a consequence of it.
    """
    k = M + l * (d - 1)
    if k % d == 0:
        raise ValueError(f"d divides k = {k}")
    perm = list(range(1, k + 1)) if perm is None else list(perm)
    parts = ucp_parts(l, d, k, _ucp_psi(M, l, d, k, perm))
    target = generate("injphp", m=M, n=l).formula
    U = InjUniverse.standard(M, l)
    ev = build_evaluation([parts.formula, target] + parts.all_formulas(), U)
    ax = {"axiom": {"scheme": "ucp", "params": {"l": l, "d": d, "n": k},
                    "subst": {str(var("r", *c)): formula_to_json(f) for c, f in sorted(parts.psi.items())}}}
    proof = FregeProof([ProofLine(parts.formula, ax),
                        ProofLine(target, {"rule": {"name": "consequence", "premises": [0]}})])
    return {"kind": "ucp", "params": {"M": M, "l": l, "d": d, "k": k, "perm": perm},
            "evaluation": ev, "proof": proof}


def _block(*b):
    return var("r", tuple(b))


def build_oddtown_case():
    """oddtown_2 over 4 points with p = 3, every formula a block variable or
    its negation; the evaluation uses the query-every-vertex trees."""
    a, b, c, d = _block(1, 2, 3), _block(1, 2, 4), _block(1, 3, 4), _block(2, 3, 4)
    sub = {}
    for i in (1, 2, 3):
        sub[var("q", i, 1)] = a
        sub[var("q", i, 2)] = b
        sub[var("p", i, (1, 2))] = c
    for ii in [(1, 2), (1, 3), (2, 3)]:
        sub[var("rr", *ii, (1, 2))] = a
    sig = {(1, 1): a, (1, 2): b, (2, 1): c, (2, 2): d, (3, 1): Not(a), (3, 2): Not(b)}
    for (i, j), f in sig.items():
        sub[var("s", i, j)] = f
    inst = subst_instance("oddtown", {"n": 2}, sub)
    ev = build_evaluation([inst.formula], PUniverse.standard(4, 3), lean=False)
    return {"kind": "oddtown", "params": {"M": 4, "p": 3, "n": 2},
            "evaluation": ev, "instance": inst}


# FIE over 4 points, p = 3.  Every two blocks meet, so a height-1 tree
# asking any vertex represents any family of blocks: an Or node may query
# whichever vertex we like.  A value (x, F) is the tree asking the vertex
# outside block x, labelled 1 exactly on F.
_B123, _B124, _B134, _B234 = (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)
FIE_S = {
    (1, 1): (_B123, ()), (1, 2): (_B123, (_B124, _B134, _B234)),
    (2, 1): (_B123, (_B124,)), (2, 2): (_B124, (_B123, _B134)),
    (3, 1): (_B123, (_B124,)), (3, 2): (_B134, (_B123, _B234)),
}
_NONE = (_B123, ())
FIE_RR = {
    (1, 2, 1, 2): {(2, 2): (_B123, (_B124, _B134))},
    (1, 2, 1, 3): {(2, 2): (_B234, (_B123, _B134))},
    (1, 2, 2, 3): {(2, 1): (_B123, (_B124,)), (2, 2): (_B123, (_B134,))},
    (1, 3, 1, 2): {(2, 2): (_B234, (_B123, _B134))},
    (1, 3, 1, 3): {(2, 2): (_B123, (_B134, _B234))},
    (1, 3, 2, 3): {(2, 1): (_B123, (_B124,)), (2, 2): (_B123, (_B134, _B234))},
    (2, 3, 1, 2): {(1, 2): (_B123, (_B124,)), (2, 2): (_B123, (_B134,))},
    (2, 3, 1, 3): {(1, 2): (_B123, (_B124,)), (2, 2): (_B123, (_B134, _B234))},
    (2, 3, 2, 3): {(1, 2): (_B123, (_B124,)), (2, 1): (_B123, (_B124,)), (2, 2): (_B123, (_B134,))},
}


def _vertex_outside(U, x):
    return min(set(U.elements) - set(x))


def _valued_tree(U, v, fam):
    fam = {tuple(sorted(b)) for b in fam}
    return query_tree(U, ("elem", v), lambda a: 1 if tuple(sorted(a)) in fam else 0)


def _or_nodes(g, fixed, acc):
    if g in fixed or isinstance(g, (Var, Const)):
        return acc
    if isinstance(g, Not):
        return _or_nodes(g.child, fixed, acc)
    for c in g.children:
        _or_nodes(c, fixed, acc)
    if g not in acc:
        acc.append(g)
    return acc


def _tree_under(g, U, fixed, choice, memo):
    if g in memo:
        return memo[g]
    if g in fixed:
        T = fixed[g]
    elif isinstance(g, Var):
        T = variable_tree(g, U)
    elif isinstance(g, Not):
        T = complement(_tree_under(g.child, U, fixed, choice, memo))
    else:
        fam = [b for c in g.children for b in br(_tree_under(c, U, fixed, choice, memo), 1)]
        T = _valued_tree(U, choice[g], [next(iter(b.atoms)) for b in fam])
    memo[g] = T
    return T


def _choose_vertices(g, U, fixed):
    """Vertices for the Or nodes of ``g`` making every branch of T_g 1."""
    nodes = _or_nodes(g, fixed, [])
    for combo in product(sorted(U.elements), repeat=len(nodes)):
        choice = dict(zip(nodes, combo))
        memo = {}
        if all(lab == 1 for _, lab in labeled_branches(_tree_under(g, U, fixed, choice, memo))):
            return {h: memo[h] for h in nodes}
    raise ValueError(f"no vertex choice models {g!r}")


def build_fie_case():
    """FIE_2 over 4 points with p = 3 and hand-picked Or trees.

    Each s and rr variable becomes a distinct disjunction of block
    variables with a prescribed (x, F) value; the Or nodes of the matrix
    conjuncts get vertices making each conjunct hold, so the instance is
    falsified.
    """
    U = PUniverse.standard(4, 3)
    fixed, sub, seen = {}, {}, set()

    def realize(v, x, fam):
        kids = [_block(*b) for b in fam] or [_block(*x)]
        f, extra = Or(kids), 0
        while f in seen:
            extra += 1
            f = Or(kids + [kids[0]] * extra)
        seen.add(f)
        sub[v] = f
        fixed[f] = _valued_tree(U, _vertex_outside(U, x), fam)

    for (i, j), (x, fam) in sorted(FIE_S.items()):
        realize(var("s", i, j), x, fam)
    for q, vals in sorted(FIE_RR.items()):
        for j in (1, 2):
            for jp in (1, 2):
                realize(var("rr", *q, j, jp), *vals.get((j, jp), _NONE))
    inst = subst_instance("fie", {"n": 2}, sub)
    over = dict(fixed)
    for c in generate("fie", n=2).matrix:
        over.update(_choose_vertices(simplify(inst.sub(c)), U, fixed))
    ev = build_evaluation([inst.formula], U, overrides=over)
    return {"kind": "fie", "params": {"M": 4, "p": 3, "n": 2},
            "evaluation": ev, "instance": inst}


UCP_CASES = {
    "ucp_M3_l2_d2": (3, 2, 2, None),
    "ucp_M3_l2_d2_perm": (3, 2, 2, [5, 3, 1, 4, 2]),
    "ucp_M3_l2_d3": (3, 2, 3, None),
    "ucp_M3_l2_d3_perm": (3, 2, 3, [7, 1, 6, 2, 5, 3, 4]),
    "ucp_M4_l2_d3": (4, 2, 3, None),
}


def build_all() -> dict:
    out = {name: build_ucp_case(*args) for name, args in UCP_CASES.items()}
    out["oddtown_M4_n2"] = build_oddtown_case()
    out["fie_M4_n2"] = build_fie_case()
    return out


def _to_json(case):
    obj = {"kind": case["kind"], "params": case["params"],
           "evaluation": evaluation_to_json(case["evaluation"])}
    if "proof" in case:
        obj["proof"] = proof_to_json(case["proof"])
    else:
        obj["instance"] = case["instance"].to_axiom()
    return obj


def freeze(cases: dict, directory: Path | None = None) -> list:
    directory = CORPUS_DIR if directory is None else Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, case in sorted(cases.items()):
        path = directory / f"{name}.json"
        path.write_text(json.dumps(_to_json(case), sort_keys=True, separators=(",", ":")) + "\n")
        written.append(path)
    return written


def names(kind: str | None = None, directory: Path | None = None) -> list:
    directory = CORPUS_DIR if directory is None else Path(directory)
    out = []
    for path in sorted(directory.glob("*.json")):
        if kind is None or path.stem.split("_")[0] == kind:
            out.append(path.stem)
    return out


def load(name: str, directory: Path | None = None) -> dict:
    """A frozen case: kind, params, evaluation and proof or instance."""
    directory = CORPUS_DIR if directory is None else Path(directory)
    path = Path(name) if name.endswith(".json") else directory / f"{name}.json"
    obj = json.loads(path.read_text())
    case = {"kind": obj["kind"], "params": obj["params"],
            "evaluation": evaluation_from_json(obj["evaluation"])}
    if "proof" in obj:
        case["proof"] = proof_from_json(obj["proof"])
    else:
        case["instance"] = instance_from_axiom(obj["instance"])
    return case
