"""Construction engines that turn tree evaluations into NS certificates.

The basic tool is the subtree sum: for a node reached by the partial map
beta in a tree, the sum of x over the leaves below it equals x_beta modulo
the system, with a certificate read off the tree (one row per query node,
monomial generators for the edges the node cannot take).  Branch sums are
the subtree sums at the root.  Everything else is bookkeeping over labelled
concatenated trees.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path

from .formulas import Formula, Not, Or, Var, simplify, substitute
from .nullstellensatz import (
    NSProof,
    Nonconclusive,
    PolySystem,
    add_cert,
    mono_of,
    prime_power_components,
    project_mod,
    prune,
    substitute_u,
    system_neg_count,
    system_neg_injstar,
    verify_ns,
)
from .partial import InjUniverse, PartialInjection, PartialPartition, PUniverse
from .poly import Polynomial, RingSpec, mono_mul, uvar, xblock, xvar
from .trees import (
    HeightError,
    Leaf,
    Node,
    Tree,
    br,
    branches,
    concat,
    concat_full,
    height,
    labeled_branches,
    relabel,
    restrict_labeled,
    strip_labels,
)

__all__ = [
    "ConstructionError",
    "system_for_universe",
    "subtree_certificate",
    "branch_sum_proof",
    "product_certificate",
    "cut_sum_certificate",
    "node_at",
    "UcpParts",
    "ucp_parts",
    "ucp_observations",
    "MatchedTreeFamilies",
    "build_matched_families",
    "assemble_ucp_refutation",
    "compile_ucp_pipeline",
    "check_families",
    "cert_times",
    "family_poly",
    "SubstInstance",
    "subst_instance",
    "instance_from_axiom",
    "OddtownWitnessPolys",
    "oddtown_extract",
    "FieWitnessPolys",
    "fie_extract",
    "write_bundle",
    "jsonable",
]


class ConstructionError(ValueError):
    """A fact the construction relies on fails on the given evaluation."""


# -- systems and monomials ------------------------------------------------------

def system_for_universe(universe, ring: RingSpec) -> PolySystem:
    """not-inj*PHP over an injection universe, not-Count^p over a p-universe."""
    if universe.kind == "inj":
        return system_neg_injstar(0, 0, ring, pigeons=sorted(universe.pigeons),
                                  holes=sorted(universe.holes))
    return system_neg_count(universe.p, 0, ring, elements=sorted(universe.elements))


def _drop(beta, atom):
    """beta without one atom."""
    if beta.kind == "inj":
        return PartialInjection(beta.atoms - {atom})
    return PartialPartition(beta.atoms - {atom}, beta.p)


def _mono_without(beta, atom) -> tuple:
    return mono_of(_drop(beta, atom))


def _clash(c, e, kind) -> bool:
    """Two distinct atoms that cannot sit in one partial map."""
    if kind == "part":
        return bool(set(c) & set(e))
    if len(c) == 2 and len(e) == 2 and c[0] == e[0]:
        return True
    return c[-1] == e[-1]


def _overlap_name(e, f):
    e, f = sorted((tuple(e), tuple(f)))
    return "overlap({" + ",".join(map(str, e)) + "};{" + ",".join(map(str, f)) + "})"


def _add(cert, name, ring, mono, c):
    if c % ring.modulus == 0:
        return
    h = cert.get(name)
    term = Polynomial.monomial(ring, mono, c)
    cert[name] = term if h is None else h + term


def _node_rows(node, beta, universe, system, cert, scale):
    """Certificate for x_beta * (row of the query) split into children and
    monomial-generator terms; adds +scale * x_beta * row and subtracts the
    generator expansions of the terms that are not children."""
    ring = system.ring
    xb = mono_of(beta)
    kind, v = node.query
    if kind == "pigeon":
        _add(cert, f"pigeon({v})", ring, xb, scale)
        owner = {a[-1]: a for a in beta.atoms}
        for j in system.meta["holes"]:
            if j in universe.holes:
                continue
            a = owner.get(j)
            if a is None:
                raise ConstructionError(f"hole {j} is neither free nor used at {beta}")
            rest = _mono_without(beta, a)
            if len(a) == 2:
                i2 = a[0]
                name = f"inj({min(v, i2)},{max(v, i2)};{j})"
                _add(cert, name, ring, rest, -scale)
            else:
                # u_j x_vj = x_vj * hole_j - (x_vj^2 - x_vj) - sum_{i'} x_vj x_i'j
                if f"hole({j})" not in system:
                    raise ConstructionError("hole-empty atoms need the starred system")
                _add(cert, f"hole({j})", ring, mono_mul(rest, ((xvar(v, j), 1),)), -scale)
                _add(cert, f"bool({xvar(v, j)})", ring, rest, scale)
                for i2 in system.meta["pigeons"]:
                    if i2 != v:
                        _add(cert, f"inj({min(v, i2)},{max(v, i2)};{j})", ring, rest, scale)
    elif kind == "hole":
        if f"hole({v})" not in system:
            raise ConstructionError("hole queries need the starred system")
        _add(cert, f"hole({v})", ring, xb, scale)
        where = {a[0]: a for a in beta.atoms if len(a) == 2}
        for i in system.meta["pigeons"]:
            if i in universe.pigeons:
                continue
            a = where.get(i)
            if a is None:
                raise ConstructionError(f"pigeon {i} is neither free nor used at {beta}")
            rest = _mono_without(beta, a)
            j2 = a[1]
            _add(cert, f"func({i};{min(v, j2)},{max(v, j2)})", ring, rest, -scale)
    else:
        _add(cert, f"cover({v})", ring, xb, scale)
        p = system.meta["p"]
        from itertools import combinations
        others = [w for w in system.meta["elements"] if w != v]
        for c in combinations(others, p - 1):
            e = tuple(sorted((v,) + c))
            if set(e) <= universe.elements:
                continue
            hit = next(b for b in beta.atoms if set(b) & set(e))
            rest = _mono_without(beta, hit)
            _add(cert, _overlap_name(hit, e), ring, rest, -scale)


def subtree_certificate(node, beta, universe, system: PolySystem, cert: dict | None = None,
                        scale: int = 1) -> dict:
    """Add scale * certificate of  sum_{leaves below} x_{beta+pi} - x_beta.

    ``node`` is reached by ``beta`` and lives over ``universe`` (the
    universe left after beta).  Returns the certificate dict.
    """
    cert = {} if cert is None else cert
    stack = [(node, beta, universe)]
    while stack:
        nd, b, U = stack.pop()
        if isinstance(nd, Leaf):
            continue
        _node_rows(nd, b, U, system, cert, scale)
        for a, c in nd.edges:
            stack.append((c, b.add(a), U.without_atom(a)))
    return cert


def branch_sum_proof(T: Tree, ring: RingSpec, *, system: PolySystem | None = None,
                     strict: bool = True) -> NSProof:
    """NS proof of sum_{alpha in br(T)} x_alpha = 1 from not-inj*PHP (or
    from not-Count^p for a p-tree), of degree <= height(T).

    At a node reached by beta asking pigeon i the coefficient of the row
    sum_j x_ij - 1 is x_beta; a hole query uses sum_i x_ij + u_j - 1 and an
    element query the cover row.  Edges the node cannot take are products
    killed by monomial generators.  ``strict`` enforces height(T) <= |R|.
    """
    U = T.universe
    if strict and U.kind == "inj" and height(T) > len(U.holes):
        raise HeightError(f"height {height(T)} exceeds |R| = {len(U.holes)}")
    system = system or system_for_universe(U, ring)
    cert = subtree_certificate(T.root, U.empty(), U, system)
    g1 = Polynomial(ring, {})
    for b in branches(T):
        g1 = g1 + Polynomial.monomial(ring, mono_of(b))
    return NSProof(system, prune(cert), g1, Polynomial.const(ring, 1),
                   note={"construction": "branch-sum", "height": height(T)})


def node_at(T: Tree, beta):
    """(node, universe) reached from the root along the atoms of beta."""
    node, U = T.root, T.universe
    path = U.empty()
    while len(path) < len(beta):
        if isinstance(node, Leaf):
            raise KeyError(f"{beta} runs past a leaf")
        for a, c in node.edges:
            if a in beta.atoms:
                node, U, path = c, U.without_atom(a), path.add(a)
                break
        else:
            raise KeyError(f"{beta} is not a node path of the tree")
    return node, U


def cut_sum_certificate(T: Tree, cuts, system: PolySystem, cert: dict | None = None,
                        scale: int = 1):
    """Certificate of  sum_{leaves below the cuts} x - sum_{s in cuts} x_s.

    Returns (cert, leaves) where leaves lists the branches below the cuts."""
    cert = {} if cert is None else cert
    leaves = []
    for s in cuts:
        node, U = node_at(T, s)
        subtree_certificate(node, s, U, system, cert, scale)
        sub = Tree(U, node)
        leaves.extend(s.union(b) for b in branches(sub))
    return cert, leaves


def product_certificate(maps, system: PolySystem, cert: dict | None = None, scale: int = 1,
                        extra: tuple = ()):
    """Certificate of  extra * (prod x_a - x_{union})  over a list of maps,
    or of  extra * prod x_a  when they are not jointly compatible.

    Returns (cert, union or None).  Two clashing atoms are killed by one
    monomial generator; repeated atoms are reduced by boolean rows.
    """
    cert = {} if cert is None else cert
    ring = system.ring
    maps = list(maps)
    kind = maps[0].kind if maps else "part"
    atoms = [a for b in maps for a in b.atoms]
    distinct = sorted(set(atoms))
    for n, c in enumerate(distinct):
        for e in distinct[n + 1:]:
            if _clash(c, e, kind):
                rest = extra
                for b in maps:
                    rest = mono_mul(rest, mono_of(b))
                d = dict(rest)
                for atom in (c, e):
                    name = _atom_var(atom, kind)
                    d[name] -= 1
                    if not d[name]:
                        del d[name]
                rest = tuple(sorted(d.items()))
                if kind == "part":
                    name = _overlap_name(c, e)
                elif len(c) == 1 or len(e) == 1:
                    raise ConstructionError("products of hole-empty atoms are not supported")
                elif c[0] == e[0]:
                    name = f"func({c[0]};{min(c[1], e[1])},{max(c[1], e[1])})"
                else:
                    name = f"inj({min(c[0], e[0])},{max(c[0], e[0])};{c[1]})"
                _add(cert, name, ring, rest, scale)
                return cert, None
    m = extra
    for b in maps:
        m = mono_mul(m, mono_of(b))
    d = dict(m)
    for atom in distinct:
        name = _atom_var(atom, kind)
        if kind == "inj" and len(atom) == 1 and d[name] > 1:
            raise ConstructionError("products of hole-empty atoms are not supported")
        # x^k r - x^(k-1) r = x^(k-2) r (x^2 - x)
        while d[name] > 1:
            d[name] -= 2
            rest = tuple(sorted((k, v) for k, v in d.items() if v))
            _add(cert, f"bool({name})", ring, rest, scale)
            d[name] += 1
    union = maps[0].__class__(distinct) if kind == "inj" else PartialPartition(distinct, maps[0].p)
    return cert, union


def _atom_var(atom, kind):
    if kind == "part":
        return xblock(atom)
    return xvar(*atom) if len(atom) == 2 else uvar(atom[0])


def cert_times(cert: dict, poly: Polynomial, out: dict | None = None, scale: int = 1) -> dict:
    """out += scale * poly * cert (every coefficient multiplied by poly)."""
    out = {} if out is None else out
    for name, h in cert.items():
        term = h * poly
        if scale != 1:
            term = term.scale(scale)
        out[name] = term if name not in out else out[name] + term
    return out


def family_poly(maps, ring) -> Polynomial:
    """sum of x_alpha over a list of partial maps."""
    t = {}
    for b in maps:
        m = mono_of(b)
        t[m] = t.get(m, 0) + 1
    return Polynomial(ring, t)


# -- the UCP pipeline -------------------------------------------------------------

@dataclass
class UcpParts:
    """The subformulas of a substituted UCP^{l,d}_k instance the construction
    reads (unsimplified; the evaluation simplifies on lookup)."""
    l: int
    d: int
    k: int
    psi: dict  # (i, j, e) -> Formula
    formula: Formula

    def S(self, i, j, e):
        return self.psi[i, j, e]

    def S_e(self, e):
        return Or(self.psi[i, j, e] for i in range(1, self.l + 1) for j in range(1, self.d + 1))

    def S_ij(self, i, j):
        return Or(self.psi[i, j, e] for e in range(1, self.k + 1))

    def P(self, i):
        return Or(Not(self.S_ij(i, j)) for j in range(1, self.d + 1))

    def N(self, i):
        return Or(self.S_ij(i, j) for j in range(1, self.d + 1))

    def U(self, i):
        return Or((Not(self.P(i)), Not(self.N(i))))

    def all_formulas(self):
        out = [self.formula]
        for i in range(1, self.l + 1):
            out.append(self.U(i))
            for j in range(1, self.d + 1):
                out.append(self.S_ij(i, j))
        for e in range(1, self.k + 1):
            out.append(self.S_e(e))
        return out


def ucp_parts(l: int, d: int, k: int, psi: dict) -> UcpParts:
    """Substitute psi[(i,j,e)] for r[i,j,e] in UCP^{l,d}_k."""
    from .formulas import var
    from .principles import generate
    inst = generate("ucp", l=l, d=d, n=k)
    sub = {var("r", i, j, e): psi[i, j, e] for (i, j, e) in psi}
    return UcpParts(l, d, k, dict(psi), substitute(inst.formula, sub))


def ucp_parts_from_axiom(just: dict) -> UcpParts:
    from .formulas import formula_from_json, parse_var_name
    ax = just["axiom"]
    if ax.get("scheme") != "ucp":
        raise ValueError("not a UCP axiom instance")
    pr = ax["params"]
    l, d, k = pr["l"], pr["d"], pr["n"]
    psi = {}
    for name, fj in ax["subst"].items():
        v = parse_var_name(name)
        psi[tuple(v.index)] = formula_from_json(fj)
    return ucp_parts(l, d, k, psi)


def _extends_one(b, maps):
    return any(s <= b for s in maps)


def ucp_observations(ev, parts: UcpParts) -> list:
    """The four facts the construction relies on; returns failure strings."""
    l, d, k = parts.l, parts.d, parts.k
    cells = [(i, j) for i in range(1, l + 1) for j in range(1, d + 1)]
    one = {(i, j, e): br(ev[parts.S(i, j, e)], 1) for (i, j) in cells for e in range(1, k + 1)}
    out = []
    for e in range(1, k + 1):
        Se = ev[parts.S_e(e)]
        for b, lab in labeled_branches(Se):
            hits = [c for c in cells if _extends_one(b, one[c + (e,)])]
            if lab != 1 or not hits:
                out.append(f"obs1: branch {b} of S_{e} extends no 1-branch of any S_(i,j,{e})")
        for c1 in range(len(cells)):
            for c2 in range(c1 + 1, len(cells)):
                for b1 in one[cells[c1] + (e,)]:
                    for b2 in one[cells[c2] + (e,)]:
                        if b1.compatible(b2):
                            out.append(f"obs2: e={e} cells {cells[c1]},{cells[c2]}: {b1} || {b2}")
    for (i, j) in cells:
        for e in range(1, k + 1):
            for e2 in range(e + 1, k + 1):
                for b1 in one[i, j, e]:
                    for b2 in one[i, j, e2]:
                        if b1.compatible(b2):
                            out.append(f"obs3: cell {(i, j)} e={e},{e2}: {b1} || {b2}")
    for i in range(1, l + 1):
        Ui = ev[parts.U(i)]
        p0 = br(ev[parts.P(i)], 0)
        n0 = br(ev[parts.N(i)], 0)
        s0 = [b for j in range(1, d + 1) for b in br(ev[parts.S_ij(i, j)], 0)]
        s1 = [b for j in range(1, d + 1) for e in range(1, k + 1) for b in one[i, j, e]]
        for b, lab in labeled_branches(Ui):
            former, latter = _extends_one(b, p0), _extends_one(b, n0)
            if lab != 1 or former == latter:
                out.append(f"obs4: branch {b} of U_{i} is in {'both' if former else 'neither'} case")
            elif former and any(b.compatible(c) for c in s0):
                out.append(f"obs4: branch {b} of U_{i} meets a 0-branch of some S_({i},j)")
            elif latter and any(b.compatible(c) for c in s1):
                out.append(f"obs4: branch {b} of U_{i} meets a 1-branch of some S_({i},j,e)")
    return out


@dataclass
class MatchedTreeFamilies:
    l: int
    d: int
    k: int
    universe: object
    X: dict  # (i, j) -> labelled Tree, labels (i, j, e) or "bot"
    Y: dict  # e -> labelled Tree, labels (i, j, e)
    intermediates: dict = field(default_factory=dict)

    def max_height(self):
        return max([height(t) for t in self.X.values()] + [height(t) for t in self.Y.values()],
                   default=0)


BOT = "bot"


def _unique(b, cands, what):
    hits = [c for c, maps in cands if _extends_one(b, maps)]
    if len(hits) != 1:
        raise ConstructionError(f"{what}: branch {b} matches {len(hits)} candidates")
    return hits[0]


def check_families(fam: MatchedTreeFamilies) -> list:
    """Literal branch-set comparison of the two invariants."""
    out = []
    for (i, j), X in fam.X.items():
        for e in range(1, fam.k + 1):
            a = set(br(X, (i, j, e)))
            b = set(br(fam.Y[e], (i, j, e)))
            if a != b or len(a) != len(br(X, (i, j, e))):
                out.append(f"br_<{i},{j},{e}>(X) != br_<{i},{j},{e}>(Y)")
    for i in range(1, fam.l + 1):
        ref = set(br(fam.X[i, 1], BOT))
        for j in range(2, fam.d + 1):
            if set(br(fam.X[i, j], BOT)) != ref:
                out.append(f"br_bot(X_{i},1) != br_bot(X_{i},{j})")
    for e, Y in fam.Y.items():
        for _, lab in labeled_branches(Y):
            if not (isinstance(lab, tuple) and lab[2] == e):
                out.append(f"Y_{e} has a branch labelled {lab!r}")
                break
    return out


def build_matched_families(ev, parts: UcpParts) -> MatchedTreeFamilies:
    """The labelled families X_{i,j} and Y_e.

    Y_e := S_e * sum_b (U_{i_b} * S_{i_b,j_b})^b, every branch above b
    labelled <i_b, j_b, e>.  X_{i,j}: over the branches B of U_i lying
    above a 0-branch of P_i graft S_{i,j}, then over each such branch graft
    S_{e} for the unique e it selects; label <i,j,e> there and bot on the
    other branches of U_i.  Concatenation ignores labels.
    """
    obs = ucp_observations(ev, parts)
    if obs:
        raise ConstructionError("; ".join(obs[:5]) + (f" (+{len(obs) - 5} more)" if len(obs) > 5 else ""))
    l, d, k = parts.l, parts.d, parts.k
    cells = [(i, j) for i in range(1, l + 1) for j in range(1, d + 1)]
    one = {(i, j, e): br(ev[parts.S(i, j, e)], 1) for (i, j) in cells for e in range(1, k + 1)}
    Ut = {i: strip_labels(ev[parts.U(i)]) for i in range(1, l + 1)}
    Sij = {c: strip_labels(ev[parts.S_ij(*c)]) for c in cells}
    Se = {e: strip_labels(ev[parts.S_e(e)]) for e in range(1, k + 1)}
    inter = {"U": Ut, "S_ij": Sij, "S_e": Se}

    Y = {}
    for e in range(1, k + 1):
        T = Se[e]
        lab = {}
        grafts = {}
        for b in branches(T):
            i, j = _unique(b, [(c, one[c + (e,)]) for c in cells], f"Y_{e}")
            lab[b] = (i, j, e)
            inner = concat_full(Ut[i], Sij[i, j], strict=False)
            grafts[b] = restrict_labeled(inner, b, strict=False)
        T = relabel(T, lambda b, _: lab[b])
        Y[e] = concat(T, grafts, combine=lambda outer, inner: outer, strict=False)

    X = {}
    for i in range(1, l + 1):
        p0 = br(ev[parts.P(i)], 0)
        B = [b for b in branches(Ut[i]) if _extends_one(b, p0)]
        for j in range(1, d + 1):
            Xt = relabel(Ut[i], lambda b, _: "B" if b in B else BOT)
            Xt = concat(Xt, {b: restrict_labeled(Sij[i, j], b, strict=False) for b in B},
                        combine=lambda outer, inner: outer, strict=False)
            lab, grafts = {}, {}
            for bt, tag in labeled_branches(Xt):
                if tag == BOT:
                    continue
                e = _unique(bt, [(e, one[i, j, e]) for e in range(1, k + 1)], f"X_{i},{j}")
                lab[bt] = (i, j, e)
                grafts[bt] = restrict_labeled(Se[e], bt, strict=False)
            Xt = relabel(Xt, lambda b, tag: lab.get(b, BOT))
            X[i, j] = concat(Xt, grafts, combine=lambda outer, inner: outer, strict=False)
        inter.setdefault("B", {})[i] = B

    fam = MatchedTreeFamilies(l, d, k, ev.universe, X, Y, inter)
    bad = check_families(fam)
    if bad:
        raise ConstructionError("family invariants fail: " + "; ".join(bad[:5]))
    return fam


def assemble_ucp_refutation(fam: MatchedTreeFamilies, d: int | None = None) -> NSProof:
    """NS proof of k = 0 over Z_d from not-inj*PHP.

    sum_{i,j}(sum br(X_ij) - 1) - sum_e (sum br(Y_e) - 1) combines the
    branch-sum certificates; the left side is l*d - k plus d times the bot
    branches once the matched labels cancel, i.e. -k mod d.
    """
    d = fam.d if d is None else d
    if fam.k % d == 0:
        raise ValueError(f"d = {d} divides k = {fam.k}: nothing to refute")
    bad = check_families(fam)
    if bad:
        raise ConstructionError("family invariants fail: " + "; ".join(bad[:3]))
    ring = RingSpec.zmod(d)
    system = system_for_universe(fam.universe, ring)
    cert = {}
    for T in fam.X.values():
        subtree_certificate(T.root, T.universe.empty(), T.universe, system, cert, -1)
    for T in fam.Y.values():
        subtree_certificate(T.root, T.universe.empty(), T.universe, system, cert, 1)
    # sum_e (Y-1) - sum_ij (X-1) = sum(Y) - sum(X) + l d - k  =  -k + d(...)
    return NSProof(system, prune(cert), Polynomial.const(ring, -fam.k), Polynomial.zero(ring),
                   note={"construction": "ucp-assembly", "bound": fam.max_height()})


def _choose_component(d, k):
    for q in prime_power_components(d):
        if k % q:
            return q
    raise Nonconclusive(f"{k} vanishes in every prime-power component of Z_{d}")


def compile_ucp_pipeline(proof, ev, d: int | None = None, *, strict: bool = False) -> dict:
    """Falsified UCP axiom -> NS refutation of not-injPHP over a field.

    Stages: audit, normalize_instance, build_matched_families,
    assemble_ucp_refutation, substitute_u, project_mod.  Every falsified
    line must be a UCP axiom instance or inherit its falsity from a
    falsified premise; the first falsified UCP instance is used.
    """
    from .evaluations import audit_proof, models, normalize_instance
    bad = audit_proof(proof, ev)
    falsified = set(bad)
    chosen = None
    for n in bad:
        ln = proof.lines[n]
        if ln.kind == "axiom" and ln.just["axiom"].get("scheme") == "ucp":
            chosen = n if chosen is None else chosen
        elif ln.kind == "rule" and any(q in falsified for q in ln.just["rule"].get("premises", [])):
            continue
        else:
            raise ConstructionError(f"line {n} is falsified but is not a UCP axiom instance")
    if chosen is None:
        raise ConstructionError("no falsified UCP axiom instance")
    if br(ev.tree(proof.target), 1):
        raise ConstructionError("target line has 1-branches")
    parts = ucp_parts_from_axiom(proof.lines[chosen].just)
    d = parts.d if d is None else d
    rho, ev2 = normalize_instance(parts.formula, ev, strict=strict)
    fam = build_matched_families(ev2, parts)
    star = assemble_ucp_refutation(fam, d)
    v_star = verify_ns(star)
    plain = substitute_u(star)
    q = _choose_component(d, parts.k)
    final = project_mod(plain, q)
    v_final = verify_ns(final)
    report = {
        "line": chosen,
        "rho": rho,
        "universe": ev2.universe,
        "k_eval": ev.k,
        "bound": fam.max_height(),
        "bound_2k": 2 * ev.k,
        "degree_star": star.degree(),
        "degree_plain": plain.degree(),
        "degree_final": final.degree(),
        "component": q,
        "verified_star": v_star.valid,
        "verified_plain": verify_ns(plain).valid,
        "verified_final": v_final.valid,
    }
    return {"families": fam, "star": star, "plain": plain, "final": final, "report": report}


# -- p-tree extractions ---------------------------------------------------------------

@dataclass
class SubstInstance:
    """scheme[params] with formulas substituted for its variables."""
    scheme: str
    params: dict
    subst: dict  # Var -> Formula
    formula: Formula

    def sub(self, template: Formula) -> Formula:
        return substitute(template, self.subst, partial=True)

    def to_axiom(self) -> dict:
        from .formulas import formula_to_json
        return {"axiom": {"scheme": self.scheme, "params": dict(self.params),
                          "subst": {str(v): formula_to_json(f) for v, f in self.subst.items()}}}


def subst_instance(scheme: str, params: dict, subst: dict) -> SubstInstance:
    from .principles import generate
    inst = generate(scheme, **params)
    sub = {v: subst.get(v, v) for v in inst.variables}
    extra = set(subst) - set(inst.variables)
    if extra:
        raise ValueError(f"substitution names unknown variables: {sorted(map(str, extra))[:3]}")
    return SubstInstance(scheme, dict(params), sub, substitute(inst.formula, sub))


def instance_from_axiom(just: dict) -> SubstInstance:
    from .formulas import formula_from_json, parse_var_name
    ax = just["axiom"]
    sub = {parse_var_name(k): formula_from_json(v) for k, v in ax["subst"].items()}
    return subst_instance(ax["scheme"], ax["params"], sub)


def _holds(ev, f, what):
    """T |= f, else a ConstructionError naming the fact."""
    T = ev[f]
    bad = [b for b, lab in labeled_branches(T) if lab != 1]
    if bad:
        raise ConstructionError(f"{what}: T does not model {f!r} (branch {bad[0]})")
    return T


def _component(T, r):
    """The branch of T contained in r."""
    hits = [b for b in branches(T) if b <= r]
    if len(hits) != 1:
        raise ConstructionError(f"{r} contains {len(hits)} branches of a component tree")
    return hits[0]


def _graft_at(T, at, make):
    """T * sum_{b in at} (make(b))^b, labels ignored."""
    return concat(T, {b: restrict_labeled(strip_labels(make(b)), b, strict=False) for b in at},
                  strict=False)


def _full(T, U):
    return concat_full(strip_labels(T), strip_labels(U), strict=False)


def _under(T, cuts):
    """Branches of T extending some member of cuts."""
    return [b for b in branches(T) if _extends_one(b, cuts)]


def _normalized(ev, inst):
    from .evaluations import normalize_instance
    if br(ev[inst.formula], 1):
        raise ConstructionError("the instance has 1-branches: it is not falsified")
    return normalize_instance(inst.formula, ev, strict=False)


def _even(counter):
    return all(c % 2 == 0 for c in counter.values())


@dataclass
class OddtownWitnessPolys:
    m: int
    universe: object
    f: dict  # (i, j) -> Polynomial
    sum_proofs: dict  # i -> NSProof of sum_j f_ij + 1 = 0
    inner_proofs: dict  # (i, i') -> NSProof of sum_j f_ij f_i'j = 0
    bound: int
    rho: object = None
    pairing: dict = field(default_factory=dict)
    trees: dict = field(default_factory=dict)

    def proofs(self):
        return [("sum", i, p) for i, p in self.sum_proofs.items()] + \
               [("inner", ii, p) for ii, p in self.inner_proofs.items()]


def _oddtown_vars(m):
    from .formulas import var
    s = lambda i, j: var("s", i, j)
    q = lambda i, j: var("q", i, j)
    pv = lambda i, e: var("p", i, e)
    rv = lambda i, k, e: var("rr", i, k, e)
    return s, q, pv, rv


def oddtown_extract(ev, inst: SubstInstance, ring: RingSpec | None = None) -> OddtownWitnessPolys:
    """F2-polynomials f_ij = sum_{e in br1(T_sigma_ij)} x_e with NS proofs of
    sum_j f_ij + 1 = 0 and of sum_j f_ij f_i'j = 0 from not-Count^p.

    The product identity sums the branches B_j of U_j (built from
    T_sigma_ij, T_sigma_i'j, the pair-cover trees and U^2 for the partner
    index); they pair up across j, so their sum vanishes over F2.  The sum
    identity uses the trees V_j, W_j and Q_i; the branches C_j of the W_j
    and those of Q_i pair up the same way.
    """
    from itertools import combinations
    from .formulas import big_or
    from .principles import p_subsets
    if inst.scheme != "oddtown":
        raise ValueError("not an oddtown instance")
    m = inst.params["n"]
    ring = ring or RingSpec.field(2)
    if ring.modulus != 2:
        raise ValueError("the oddtown identities hold over F2")
    rho, ev = _normalized(ev, inst)
    U = ev.universe
    system = system_for_universe(U, ring)
    s, q, pv, rv = _oddtown_vars(m)
    S = inst.sub
    I = range(1, m + 2)
    J = range(1, m + 1)
    E = p_subsets(m, 2)
    cont = {j: [e for e in E if j in e] for j in J}
    T = lambda f: strip_labels(ev[S(f)])
    one = lambda f: br(ev[S(f)], 1)
    f = {(i, j): family_poly(one(s(i, j)), ring) for i in I for j in J}
    trees = {}
    heights = [0]

    # sum_j f_ij f_i'j = 0
    inner = {}
    pairing = {}
    for i, k in combinations(I, 2):
        def pair_tree(j):
            return _holds(ev, S(Or([Not(s(i, j)), Not(s(k, j))] + [rv(i, k, e) for e in cont[j]])),
                          f"pair cover ({i},{k},{j})")
        U1, S1, jr = {}, {}, {}
        for j in J:
            Tij = pair_tree(j)
            inner_t = _graft_at(T(s(k, j)), one(s(k, j)), lambda b: Tij)
            U1[j] = _graft_at(T(s(i, j)), one(s(i, j)), lambda b: inner_t)
            S1[j] = [r for r in branches(U1[j])
                     if _extends_one(r, one(s(i, j))) and _extends_one(r, one(s(k, j)))]
            for r in S1[j]:
                d = _component(Tij, r)
                e = _unique(d, [(e, one(rv(i, k, e))) for e in cont[j]], f"U1_{j} ({i},{k})")
                jr[j, r] = (e, e[0] if e[1] == j else e[1])
        U2, S2, Jp = {}, {}, {}
        for j in J:
            def mk(r, j=j):
                e, j2 = jr[j, r]
                return _full(_holds(ev, S(Or((s(i, j2), Not(rv(i, k, e))))), f"({i},{k},{e}) left"),
                             _holds(ev, S(Or((s(k, j2), Not(rv(i, k, e))))), f"({i},{k},{e}) right"))
            U2[j] = _graft_at(U1[j], S1[j], mk)
            S2[j] = _under(U2[j], S1[j])
            for u in S2[j]:
                r = next(r for r in S1[j] if r <= u)
                Jp[j, u] = jr[j, r][1]
        cert = {}
        total = Counter()
        Bs = {}
        for j in J:
            Uj = _graft_at(U2[j], S2[j], lambda u, j=j: U2[Jp[j, u]])
            heights.append(height(Uj))
            Bs[j] = _under(Uj, S2[j])
            total.update(Bs[j])
            cuts = []
            for b in one(s(i, j)):
                for b2 in one(s(k, j)):
                    # f_ij f_kj - sum x_{b+b2}: one product certificate per pair
                    product_certificate([b, b2], system, cert, -1)
                    if b.compatible(b2):
                        cuts.append(b.union(b2))
            # sum_{B_j} x - sum_cuts x
            _, leaves = cut_sum_certificate(Uj, cuts, system, cert, 1)
            if Counter(leaves) != Counter(Bs[j]):
                raise ConstructionError(f"B_{j} ({i},{k}) is not the set of branches below the cuts")
            trees[("U", i, k, j)] = Uj
        # pairing: b in B_j lies in B_l for its partner l
        matched = all(b in set(Bs[Jp[j, next(u for u in S2[j] if u <= b)]])
                      for j in J for b in Bs[j])
        pairing[("inner", i, k)] = matched and _even(total)
        if not pairing[("inner", i, k)]:
            raise ConstructionError(f"branches of the U_j ({i},{k}) do not pair up")
        # cert proves sum_j (sum B_j - f f');  sum B_j vanishes over F2
        g1 = Polynomial.zero(ring)
        for j in J:
            g1 = g1 + f[i, j] * f[k, j]
        coeffs = {n: h.scale(-1) for n, h in prune(cert).items()}
        inner[i, k] = NSProof(system, coeffs, g1, Polynomial.zero(ring),
                              note={"construction": "oddtown-inner", "rows": [i, k]})

    # sum_j f_ij + 1 = 0
    sums = {}
    for i in I:
        Ti = _holds(ev, S(big_or(q(i, j) for j in J)), f"row {i} has a marked element")
        Tcov = {j: _holds(ev, S(Or([Not(s(i, j)), q(i, j)] + [pv(i, e) for e in cont[j]])),
                          f"cover ({i},{j})") for j in J}
        V = {j: _graft_at(T(s(i, j)), one(s(i, j)), lambda b, j=j: Tcov[j]) for j in J}
        W, lab = {}, {}
        for j in J:
            Bj = _under(V[j], one(s(i, j)))
            kinds = {}
            for b in Bj:
                d = _component(Tcov[j], b)
                opts = ([((j,), None)] if _extends_one(d, one(q(i, j))) else []) + \
                       [(e, e) for e in cont[j] if _extends_one(d, one(pv(i, e)))]
                if len(opts) != 1:
                    raise ConstructionError(f"V_{j} row {i}: branch {b} has {len(opts)} readings")
                kinds[b] = opts[0]

            def mk(b, j=j):
                tag, e = kinds[b]
                if e is None:
                    return _full(Ti, _holds(ev, S(Or((s(i, j), Not(q(i, j))))), f"({i},{j}) mark"))
                j2 = e[0] if e[1] == j else e[1]
                return _full(_holds(ev, S(Or((s(i, j2), Not(pv(i, e))))), f"({i},{e}) pair"),
                             _full(V[j2], _holds(ev, S(Or((s(i, j), Not(pv(i, e))))), f"({i},{e}) pair")))
            W[j] = _graft_at(V[j], Bj, mk)
            heights.append(height(W[j]))
            for r in branches(W[j]):
                b = next((b for b in Bj if b <= r), None)
                lab[j, r] = BOT if b is None else kinds[b][0]
            trees[("W", i, j)] = W[j]
        jb = {}
        for b in branches(Ti):
            jb[b] = _unique(b, [(j, one(q(i, j))) for j in J], f"T_{i}")
        Qi = _graft_at(Ti, branches(Ti), lambda b: _full(
            _holds(ev, S(Or((s(i, jb[b]), Not(q(i, jb[b]))))), f"({i},{jb[b]}) mark"),
            _full(T(s(i, jb[b])), Tcov[jb[b]])))
        heights.append(height(Qi))
        trees[("Q", i)] = Qi
        # labelled matching
        ok = True
        for j in J:
            for e in cont[j]:
                j2 = e[0] if e[1] == j else e[1]
                a = {r for (jj, r), t in lab.items() if jj == j and t == e}
                c = {r for (jj, r), t in lab.items() if jj == j2 and t == e}
                ok &= a == c
        singles = Counter(r for (jj, r), t in lab.items() if t == (jj,))
        ok &= singles == Counter(branches(Qi))
        C = Counter(r for (jj, r), t in lab.items() if t != BOT)
        C.update(branches(Qi))
        pairing[("sum", i)] = ok and _even(C)
        if not pairing[("sum", i)]:
            raise ConstructionError(f"row {i}: the C_j and the branches of Q_i do not pair up")
        cert = {}
        for j in J:
            cut_sum_certificate(W[j], one(s(i, j)), system, cert, 1)  # sum C_j - f_ij
        subtree_certificate(Qi.root, Qi.universe.empty(), Qi.universe, system, cert, 1)
        g1 = Polynomial.const(ring, 1)
        for j in J:
            g1 = g1 + f[i, j]
        coeffs = {n: h.scale(-1) for n, h in prune(cert).items()}
        sums[i] = NSProof(system, coeffs, g1, Polynomial.zero(ring),
                          note={"construction": "oddtown-sum", "row": i})
    out = OddtownWitnessPolys(m, U, f, sums, inner, max(heights), rho, pairing, trees)
    for kind, idx, pr in out.proofs():
        v = verify_ns(pr)
        if not v.valid:
            raise ConstructionError(f"{kind} certificate {idx} does not verify")
        if pr.degree() > out.bound:
            raise ConstructionError(f"{kind} certificate {idx} exceeds the bound {out.bound}")
    return out


@dataclass
class FieWitnessPolys:
    m: int
    universe: object
    ring: RingSpec
    f: dict  # (i, j) -> Polynomial
    a: dict  # (i, j) -> Polynomial
    b: dict  # (i1, i2, j) -> Polynomial
    proofs: dict  # (identity, index) -> NSProof; identities a-sum, b-sum, inner,
    # a-support, b-both, b-neither
    bound: int
    rho: object = None
    matching: dict = field(default_factory=dict)
    trees: dict = field(default_factory=dict)


def _fie_vars():
    from .formulas import var
    s = lambda i, j: var("s", i, j)
    r = lambda q, j, jp: var("rr", *q, j, jp)
    return s, r


def fie_extract(ev, inst: SubstInstance, ring: RingSpec) -> FieWitnessPolys:
    """f_ij, a_ij and b_{i1 i2 j} with NS proofs of the six identities

        sum_j a_ij = 1,  sum_j b_{i1 i2 j} = 1,
        sum_j f_{i1 j} f_{i2 j} = sum_j f_{i1' j} f_{i2' j},
        a_ij (1 - f_ij) = 0,  b f_{i1 j} f_{i2 j} = 0,  b (1 - f_{i1 j})(1 - f_{i2 j}) = 0

    from not-Count^p over ``ring``.  a and b sum the branches of T_i and
    T_{i1,i2} relabelled by the least witnessing j.  The inner products
    are matched through the labelled trees S_j and S'_j.
    """
    from itertools import combinations
    from .formulas import big_and, big_or
    if inst.scheme != "fie":
        raise ValueError("not an FIE instance")
    if inst.params.get("reading", "intended") != "intended":
        raise ValueError("the extraction follows the intended reading")
    m = inst.params["n"]
    rho, ev = _normalized(ev, inst)
    U = ev.universe
    system = system_for_universe(U, ring)
    s, rv = _fie_vars()
    S = inst.sub
    I = range(1, m + 2)
    J = range(1, m + 1)
    pairs = list(combinations(I, 2))
    T = lambda f: strip_labels(ev[S(f)])
    one = lambda f: br(ev[S(f)], 1)
    zero = lambda f: br(ev[S(f)], 0)
    f = {(i, j): family_poly(one(s(i, j)), ring) for i in I for j in J}
    proofs, trees, matching = {}, {}, {}
    heights = [0]
    zero_p = Polynomial.zero(ring)
    onep = Polynomial.const(ring, 1)
    # Sigma br(T_sigma) - 1 certificates, reused for 1 - f = Sigma br0 - E
    E = {}
    for i in I:
        for j in J:
            Ts = T(s(i, j))
            E[i, j] = subtree_certificate(Ts.root, Ts.universe.empty(), Ts.universe, system, {})

    # a_ij: T_i relabelled by the least j it witnesses
    a = {}
    for i in I:
        Ti = _holds(ev, S(big_or(s(i, j) for j in J)), f"row {i} is nonempty")
        lab = {}
        for b in branches(Ti):
            js = [j for j in J if _extends_one(b, one(s(i, j)))]
            if not js:
                raise ConstructionError(f"T_{i}: branch {b} extends no 1-branch of any sigma_{i}j")
            lab[b] = js[0]
        trees[("T", i)] = relabel(Ti, lambda b, _: lab[b])
        for j in J:
            a[i, j] = family_poly([b for b in lab if lab[b] == j], ring)
        cert = subtree_certificate(Ti.root, Ti.universe.empty(), Ti.universe, system, {})
        heights.append(height(Ti))
        proofs[("a-sum", i)] = NSProof(system, prune(cert), sum((a[i, j] for j in J), zero_p), onep)
        for j in J:
            # a (1 - f) = sum_{alpha, beta in br0} x_alpha x_beta - a E
            cert = {}
            for al in (b for b in lab if lab[b] == j):
                for be in zero(s(i, j)):
                    _, un = product_certificate([al, be], system, cert)
                    if un is not None:
                        raise ConstructionError(f"a_{i}{j}: {al} meets the 0-branch {be}")
            cert_times(E[i, j], a[i, j], cert, -1)
            proofs[("a-support", (i, j))] = NSProof(system, prune(cert), a[i, j] * (onep - f[i, j]), zero_p)

    # b_{i1 i2 j}: T_{i1,i2} relabelled by the least j separating the rows
    b = {}
    for i1, i2 in pairs:
        sep = big_or(Or((big_and([s(i1, j), Not(s(i2, j))]), big_and([Not(s(i1, j)), s(i2, j)])))
                     for j in J)
        Tp = _holds(ev, S(sep), f"rows {i1},{i2} differ")
        lab, case = {}, {}
        for br_ in branches(Tp):
            for j in J:
                ca = all(not br_.compatible(c) for c in zero(s(i1, j)) + one(s(i2, j)))
                cb = all(not br_.compatible(c) for c in one(s(i1, j)) + zero(s(i2, j)))
                if ca or cb:
                    lab[br_], case[br_] = j, "a" if ca else "b"
                    break
            else:
                raise ConstructionError(f"T_{i1},{i2}: branch {br_} separates no column")
        trees[("T", i1, i2)] = relabel(Tp, lambda x, _: lab[x])
        heights.append(height(Tp))
        for j in J:
            b[i1, i2, j] = family_poly([x for x in lab if lab[x] == j], ring)
        cert = subtree_certificate(Tp.root, Tp.universe.empty(), Tp.universe, system, {})
        proofs[("b-sum", (i1, i2))] = NSProof(system, prune(cert),
                                          sum((b[i1, i2, j] for j in J), zero_p), onep)
        for j in J:
            bb = b[i1, i2, j]
            mine = [x for x in lab if lab[x] == j]
            cert = {}
            for al in mine:
                for c in one(s(i1, j)):
                    for d in one(s(i2, j)):
                        _, un = product_certificate([al, c, d], system, cert)
                        if un is not None:
                            raise ConstructionError(f"b_{i1}{i2}{j}: {al} meets {c} and {d}")
            proofs[("b-both", (i1, i2, j))] = NSProof(system, prune(cert), bb * f[i1, j] * f[i2, j], zero_p)
            # b(1-f1)(1-f2) = b S0_1 S0_2 - b S0_1 E2 - b E1 (1 - f2)
            cert = {}
            for al in mine:
                for c in zero(s(i1, j)):
                    for d in zero(s(i2, j)):
                        _, un = product_certificate([al, c, d], system, cert)
                        if un is not None:
                            raise ConstructionError(f"b_{i1}{i2}{j}: {al} meets 0-branches {c}, {d}")
            s0 = family_poly(zero(s(i1, j)), ring)
            cert_times(E[i2, j], bb * s0, cert, -1)
            cert_times(E[i1, j], bb * (onep - f[i2, j]), cert, -1)
            proofs[("b-neither", (i1, i2, j))] = NSProof(
                system, prune(cert), bb * (onep - f[i1, j]) * (onep - f[i2, j]), zero_p)

    # equal inner products, matched through S_j and S'_j
    A, AB, P = {}, {}, {}
    for i1, i2 in pairs:
        for j in J:
            A[i1, i2, j] = _full(T(s(i1, j)), T(s(i2, j)))
            cert = {}
            cuts = []
            for c in one(s(i1, j)):
                for d in one(s(i2, j)):
                    _, un = product_certificate([c, d], system, cert)
                    if un is not None:
                        cuts.append(un)
            AB[i1, i2, j] = cuts
            P[i1, i2, j] = cert  # f f' - sum_{B} x
    for p1 in pairs:
        for p2 in pairs:
            q = p1 + p2
            T1 = {j: _holds(ev, S(Or([Not(s(p1[0], j)), Not(s(p1[1], j))] +
                                     [rv(q, j, jp) for jp in J])), f"{q} left cover {j}")
                  for j in J}
            T2 = {jp: _holds(ev, S(Or([Not(s(p2[0], jp)), Not(s(p2[1], jp))] +
                                      [rv(q, j, jp) for j in J])), f"{q} right cover {jp}")
                  for jp in J}
            R = {j: _graft_at(A[p1 + (j,)], AB[p1 + (j,)], lambda x, j=j: T1[j]) for j in J}
            Rp = {jp: _graft_at(A[p2 + (jp,)], AB[p2 + (jp,)], lambda x, jp=jp: T2[jp]) for jp in J}
            jr, jh = {}, {}
            for j in J:
                for r in _under(R[j], AB[p1 + (j,)]):
                    d = _component(T1[j], r)
                    jr[j, r] = _unique(d, [(jp, one(rv(q, j, jp))) for jp in J], f"R_{j} {q}")
                for r in _under(Rp[j], AB[p2 + (j,)]):
                    d = _component(T2[j], r)
                    jh[j, r] = _unique(d, [(jj, one(rv(q, jj, j))) for jj in J], f"R'_{j} {q}")

            def Tjj(j, jp):
                fs = [Or((Not(rv(q, j, jp)), s(i, j))) for i in p1] + \
                     [Or((Not(rv(q, j, jp)), s(i, jp))) for i in p2]
                out = _holds(ev, S(fs[0]), f"{q} r implies s")
                for g in fs[1:]:
                    out = _full(out, _holds(ev, S(g), f"{q} r implies s"))
                return out
            Sj, Spj, labS, labSp = {}, {}, {}, {}
            for j in J:
                Bj = [r for (jj, r) in jr if jj == j]
                Sj[j] = _graft_at(R[j], Bj, lambda r, j=j: _full(Tjj(j, jr[j, r]), Rp[jr[j, r]]))
                for x in branches(Sj[j]):
                    r = next((r for r in Bj if r <= x), None)
                    labS[j, x] = BOT if r is None else (j, jr[j, r])
                Bpj = [r for (jj, r) in jh if jj == j]
                Spj[j] = _graft_at(Rp[j], Bpj, lambda r, j=j: _full(Tjj(jh[j, r], j), R[jh[j, r]]))
                for x in branches(Spj[j]):
                    r = next((r for r in Bpj if r <= x), None)
                    labSp[j, x] = BOT if r is None else (jh[j, r], j)
                heights += [height(Sj[j]), height(Spj[j])]
                trees[("S", q, j)] = Sj[j]
                trees[("S'", q, j)] = Spj[j]
            ok = True
            for j in J:
                for jp in J:
                    left = [x for (jj, x), t in labS.items() if jj == j and t == (j, jp)]
                    right = [x for (jj, x), t in labSp.items() if jj == jp and t == (j, jp)]
                    ok &= Counter(left) == Counter(right)
            matching[q] = ok
            if not ok:
                raise ConstructionError(f"{q}: br_<j,j'>(S_j) and br_<j,j'>(S'_j') differ")
            cert = {}
            for j in J:
                add_cert(cert, P[p1 + (j,)], ring, 1)
                add_cert(cert, P[p2 + (j,)], ring, -1)
                _, lv = cut_sum_certificate(Sj[j], AB[p1 + (j,)], system, cert, -1)
                if Counter(lv) != Counter(x for (jj, x), t in labS.items() if jj == j and t != BOT):
                    raise ConstructionError(f"{q}: labelled branches of S_{j} are not those below B")
                _, lv = cut_sum_certificate(Spj[j], AB[p2 + (j,)], system, cert, 1)
                if Counter(lv) != Counter(x for (jj, x), t in labSp.items() if jj == j and t != BOT):
                    raise ConstructionError(f"{q}: labelled branches of S'_{j} are not those below B'")
            g1 = sum((f[p1[0], j] * f[p1[1], j] for j in J), zero_p)
            g2 = sum((f[p2[0], j] * f[p2[1], j] for j in J), zero_p)
            proofs[("inner", q)] = NSProof(system, prune(cert), g1, g2)
    out = FieWitnessPolys(m, U, ring, f, a, b, proofs, max(heights), rho, matching, trees)
    for key, pr in proofs.items():
        pr.note.update(construction="fie", equation=key[0])
        if not verify_ns(pr).valid:
            raise ConstructionError(f"identity {key[0]} at {key[1]} does not verify")
        if pr.degree() > out.bound:
            raise ConstructionError(f"identity {key[0]} at {key[1]} exceeds the bound {out.bound}")
    return out


# -- output bundle --------------------------------------------------------------------

def jsonable(x):
    """Plain JSON value for reports holding restrictions and universes."""
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, float) and x == float("-inf"):
        return None
    return x


def _safe(name) -> str:
    return "".join(c if c.isalnum() or c in "-_.," else "_" for c in str(name)).strip("_")


def write_bundle(directory, certificates: dict, trees: dict, report: dict) -> Path:
    """Write a bundle of certificate and tree files under ``directory``,
    with report.json and a sha256 manifest beside them."""
    from .nullstellensatz import proof_to_text
    from .trees import tree_to_json

    root = Path(directory)
    files = {}
    for name, pr in sorted(certificates.items(), key=lambda kv: str(kv[0])):
        files[f"certificates/{_safe(name)}.ns"] = proof_to_text(pr)
    for name, T in sorted(trees.items(), key=lambda kv: str(kv[0])):
        files[f"trees/{_safe(name)}.json"] = json.dumps(tree_to_json(T), sort_keys=True) + "\n"
    files["report.json"] = json.dumps(jsonable(report), sort_keys=True, indent=1) + "\n"
    manifest = []
    for rel, text in sorted(files.items()):
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode()
        path.write_bytes(data)
        manifest.append({"path": rel, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})
    (root / "manifest.json").write_text(json.dumps({"files": manifest}, indent=1) + "\n")
    return root
