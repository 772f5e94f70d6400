"""Generators for the counting and pigeonhole principle families, a small
backtracking satisfiability test for their matrices, and a checker for
finite structures against the three conditions of the generalized counting
principle.

Every instance carries its *matrix*: the list of conjuncts inside the
outer negation.  The matrix is produced for all parameters; the formula is
the negated conjunction only when the side condition holds (``p`` does not
divide ``n`` for Count, ``m > n`` for the pigeonhole principles, and so on)
and the constant 1 otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

from .formulas import (
    TRUE,
    Formula,
    Not,
    Or,
    Var,
    big_and,
    big_or,
    eval_formula,
    eval_partial,
    formula_from_json,
    formula_to_json,
)

__all__ = [
    "PRINCIPLES",
    "PrincipleInstance",
    "ParameterError",
    "generate",
    "matrix",
    "sat_matrix",
    "SatResult",
    "GcpStructure",
    "check_gcp",
    "p_subsets",
    "code_of_block",
    "block_of_code",
    "instance_to_json",
    "instance_from_json",
]

PRINCIPLES = ("count", "injphp", "ontophp", "modphp", "ucp", "oddtown", "fie")


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class PrincipleInstance:
    principle: str
    params: tuple  # sorted (key, value) pairs
    formula: Formula
    matrix: tuple
    variables: tuple
    active: bool  # side condition holds, formula is the negated matrix

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"PrincipleInstance({self.principle}, {ps}, {len(self.variables)} vars)"


def p_subsets(n: int, p: int, universe=None):
    """All p-subsets of [n] (or of ``universe``) as sorted tuples, lexicographic."""
    elems = sorted(universe) if universe is not None else range(1, n + 1)
    return [tuple(c) for c in combinations(elems, p)]


def code_of_block(e: tuple, n: int) -> int:
    """Integer code sum_i e_i (n+1)^(p-i) of a sorted block; lies in [(n+1)^p]."""
    p = len(e)
    return sum(x * (n + 1) ** (p - 1 - k) for k, x in enumerate(sorted(e)))


def block_of_code(r: int, n: int, p: int):
    """Inverse of code_of_block; None when r does not code a p-subset of [n]."""
    digits = []
    for _ in range(p):
        digits.append(r % (n + 1))
        r //= n + 1
    if r:
        return None
    digits.reverse()
    if any(x < 1 for x in digits) or any(a >= b for a, b in zip(digits, digits[1:])):
        return None
    return tuple(digits)


def _pos(name, value, minimum=1):
    if not isinstance(value, int) or value < minimum:
        raise ParameterError(f"parameter {name} must be an integer >= {minimum}, got {value!r}")
    return value


def _neg_or(*lits):
    return Or(Not(x) for x in lits)


# -- matrices --------------------------------------------------------------

def _count_matrix(p, n):
    blocks = p_subsets(n, p)
    r = {e: Var("r", (e,)) for e in blocks}
    out = [big_or(r[e] for e in blocks if k in e) for k in range(1, n + 1)]
    for e, f in combinations(blocks, 2):
        if set(e) & set(f):
            out.append(_neg_or(r[e], r[f]))
    return out, [r[e] for e in blocks]


def _php_matrix(m, n, onto):
    r = {(i, j): Var("r", (i, j)) for i in range(1, m + 1) for j in range(1, n + 1)}
    out = [big_or(r[i, j] for j in range(1, n + 1)) for i in range(1, m + 1)]
    for i, i2 in combinations(range(1, m + 1), 2):
        for j in range(1, n + 1):
            out.append(_neg_or(r[i, j], r[i2, j]))
    if onto:
        out.extend(big_or(r[i, j] for i in range(1, m + 1)) for j in range(1, n + 1))
    for j, j2 in combinations(range(1, n + 1), 2):
        for i in range(1, m + 1):
            out.append(_neg_or(r[i, j], r[i, j2]))
    return out, list(r.values())


def _ucp_matrix(l, d, n):
    r = {(i, j, e): Var("r", (i, j, e))
         for i in range(1, l + 1) for j in range(1, d + 1) for e in range(1, n + 1)}
    out = []
    for i in range(1, l + 1):
        rows = [big_or(r[i, j, e] for e in range(1, n + 1)) for j in range(1, d + 1)]
        out.append(Or((big_and(rows), big_and(Not(x) for x in rows))))
    cells = [(i, j) for i in range(1, l + 1) for j in range(1, d + 1)]
    for i, j in cells:
        for e, e2 in combinations(range(1, n + 1), 2):
            out.append(_neg_or(r[i, j, e], r[i, j, e2]))
    for (i, j), (i2, j2) in combinations(cells, 2):
        for e in range(1, n + 1):
            out.append(_neg_or(r[i, j, e], r[i2, j2, e]))
    for e in range(1, n + 1):
        out.append(big_or(r[i, j, e] for i, j in cells))
    return out, list(r.values())


def _oddtown_matrix(n, rows=None):
    rows = n + 1 if rows is None else rows
    I = range(1, rows + 1)
    J = range(1, n + 1)
    E = p_subsets(n, 2)
    pairs = list(combinations(I, 2))
    s = {(i, j): Var("s", (i, j)) for i in I for j in J}
    q = {(i, j): Var("q", (i, j)) for i in I for j in J}
    pv = {(i, e): Var("p", (i, e)) for i in I for e in E}
    rv = {(i, k, e): Var("rr", (i, k, e)) for i, k in pairs for e in E}
    containing = {j: [e for e in E if j in e] for j in J}
    overl = [(e, f) for e, f in combinations(E, 2) if set(e) & set(f)]
    out = []
    out += [Or([Not(s[i, j]), q[i, j]] + [pv[i, e] for e in containing[j]]) for i in I for j in J]
    out += [Or((s[i, j], Not(q[i, j]))) for i in I for j in J]
    out += [Or((s[i, j], Not(pv[i, e]))) for i in I for j in J for e in containing[j]]
    out += [big_or(q[i, j] for j in J) for i in I]
    out += [_neg_or(q[i, j], q[i, j2]) for i in I for j, j2 in combinations(J, 2)]
    out += [_neg_or(q[i, j], pv[i, e]) for i in I for j in J for e in containing[j]]
    out += [_neg_or(pv[i, e], pv[i, f]) for i in I for e, f in overl]
    out += [Or([Not(s[i, j]), Not(s[k, j])] + [rv[i, k, e] for e in containing[j]])
            for i, k in pairs for j in J]
    out += [Or((s[i, j], Not(rv[i, k, e]))) for i, k in pairs for j in J for e in containing[j]]
    out += [Or((s[k, j], Not(rv[i, k, e]))) for i, k in pairs for j in J for e in containing[j]]
    out += [_neg_or(rv[i, k, e], rv[i, k, f]) for i, k in pairs for e, f in overl]
    variables = list(s.values()) + list(q.values()) + list(pv.values()) + list(rv.values())
    return out, variables


def _fie_matrix(n, rows=None, reading="intended"):
    rows = n + 1 if rows is None else rows
    I = range(1, rows + 1)
    J = range(1, n + 1)
    pairs = list(combinations(I, 2))
    quads = [(a, b) for a in pairs for b in pairs]
    s = {(i, j): Var("s", (i, j)) for i in I for j in J}
    r = {}
    for (i1, i2), (k1, k2) in quads:
        for j in J:
            for jp in J:
                r[i1, i2, k1, k2, j, jp] = Var("rr", (i1, i2, k1, k2, j, jp))
    out = [big_or(s[i, j] for j in J) for i in I]
    for i1, i2 in pairs:
        out.append(big_or(
            Or((big_and([s[i1, j], Not(s[i2, j])]), big_and([Not(s[i1, j]), s[i2, j]])))
            for j in J))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for j in J:
            out.append(Or([Not(s[i1, j]), Not(s[i2, j])] + [r[q + (j, jp)] for jp in J]))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        if reading == "intended":
            for jp in J:
                out.append(Or([Not(s[k1, jp]), Not(s[k2, jp])] + [r[q + (j, jp)] for j in J]))
        elif reading == "literal":
            # the free j of the display closed off by an outer conjunction
            for jp in J:
                for j in J:
                    out.append(Or([Not(s[k1, j]), Not(s[k2, j])] + [r[q + (jj, jp)] for jj in J]))
        else:
            raise ParameterError(f"unknown FIE reading {reading!r}")
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for j in J:
            for jp in J:
                out.append(Or((Not(r[q + (j, jp)]), s[i1, j])))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for j in J:
            for jp in J:
                out.append(Or((Not(r[q + (j, jp)]), s[i2, j])))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for j in J:
            for jp in J:
                out.append(Or((Not(r[q + (j, jp)]), s[k1, jp])))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for j in J:
            for jp in J:
                out.append(Or((Not(r[q + (j, jp)]), s[k2, jp])))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for j in J:
            for a, b in combinations(J, 2):
                out.append(_neg_or(r[q + (j, a)], r[q + (j, b)]))
    for (i1, i2), (k1, k2) in quads:
        q = (i1, i2, k1, k2)
        for jp in J:
            for a, b in combinations(J, 2):
                out.append(_neg_or(r[q + (a, jp)], r[q + (b, jp)]))
    return out, list(s.values()) + list(r.values())


def generate(principle: str, **params) -> PrincipleInstance:
    """Build a principle instance.

    Parameters by principle: count(p, n); injphp/ontophp(m, n);
    modphp(d, m, n); ucp(l, d, n); oddtown(n); fie(n, reading).
    oddtown and fie accept an optional ``rows`` giving the number of sets
    (default n + 1); fewer rows give the matrix restricted to those sets.
    """
    if principle == "count":
        p, n = _pos("p", params["p"]), _pos("n", params["n"])
        mat, vs = _count_matrix(p, n)
        active = n % p != 0
        key = (("n", n), ("p", p))
    elif principle in ("injphp", "ontophp"):
        m, n = _pos("m", params["m"]), _pos("n", params["n"])
        mat, vs = _php_matrix(m, n, onto=principle == "ontophp")
        active = m > n
        key = (("m", m), ("n", n))
    elif principle == "modphp":
        d, m, n = _pos("d", params["d"]), _pos("m", params["m"]), _pos("n", params["n"])
        mat, vs = _php_matrix(m, n, onto=True)
        active = (m - n) % d != 0
        key = (("d", d), ("m", m), ("n", n))
    elif principle == "ucp":
        l, d, n = _pos("l", params["l"]), _pos("d", params["d"]), _pos("n", params["n"])
        mat, vs = _ucp_matrix(l, d, n)
        active = n % d != 0
        key = (("d", d), ("l", l), ("n", n))
    elif principle == "oddtown":
        n = _pos("n", params["n"], minimum=0)
        rows = params.get("rows")
        if n == 0:
            mat, vs = [], []
        else:
            mat, vs = _oddtown_matrix(n, rows)
        active = n >= 1 and rows is None
        key = (("n", n),) + ((("rows", rows),) if rows is not None else ())
    elif principle == "fie":
        n = _pos("n", params["n"])
        rows = params.get("rows")
        reading = params.get("reading", "intended")
        mat, vs = _fie_matrix(n, rows, reading)
        active = rows is None
        key = (("n", n), ("reading", reading)) + ((("rows", rows),) if rows is not None else ())
    else:
        raise ParameterError(f"unknown principle {principle!r}")
    formula = Not(big_and(mat)) if active else TRUE
    return PrincipleInstance(principle, key, formula, tuple(mat), tuple(vs), active)


def matrix(inst: PrincipleInstance) -> list:
    return list(inst.matrix)


# -- satisfiability of matrices ---------------------------------------------

@dataclass
class SatResult:
    status: str  # "SAT", "UNSAT" or "UNKNOWN"
    assignment: dict | None = None
    nodes: int = 0

    def __bool__(self):
        return self.status == "SAT"


def _as_clause(f):
    """Literal list [(var, polarity)] if f is a flat clause, else None."""
    def lit(g):
        if isinstance(g, Var):
            return (g, 1)
        if isinstance(g, Not) and isinstance(g.child, Var):
            return (g.child, 0)
        return None

    single = lit(f)
    if single is not None:
        return [single]
    if isinstance(f, Or):
        lits = [lit(c) for c in f.children]
        if all(x is not None for x in lits):
            return lits
    return None


def sat_matrix(inst_or_conjuncts, *, node_limit: int = 2_000_000) -> SatResult:
    """Backtracking search with unit propagation over the matrix conjuncts.

    Flat clauses are propagated; other conjuncts are checked by three-valued
    evaluation.  Running out of ``node_limit`` decisions returns UNKNOWN.
    """
    if isinstance(inst_or_conjuncts, PrincipleInstance):
        conj = list(inst_or_conjuncts.matrix)
        order = list(inst_or_conjuncts.variables)
    else:
        conj = list(inst_or_conjuncts)
        order = sorted(set().union(*(c.variables() for c in conj)) if conj else set())
    for v in sorted(set().union(set(), *(c.variables() for c in conj)) - set(order)):
        order.append(v)

    clauses, general = [], []
    for c in conj:
        cl = _as_clause(c)
        if cl is None:
            general.append(c)
        else:
            clauses.append(cl)
    by_var_clause = {v: [] for v in order}
    for k, cl in enumerate(clauses):
        for v, _ in cl:
            by_var_clause[v].append(k)
    by_var_general = {v: [] for v in order}
    for k, g in enumerate(general):
        for v in g.variables():
            by_var_general[v].append(k)

    assign: dict = {}
    trail: list = []
    nodes = 0

    def clause_state(cl):
        free = None
        nfree = 0
        for v, pol in cl:
            val = assign.get(v)
            if val is None:
                nfree += 1
                free = (v, pol)
            elif val == pol:
                return 1, None
        return (0 if nfree == 0 else -nfree), free

    def set_and_propagate(v, val):
        queue = [(v, val)]
        while queue:
            v, val = queue.pop()
            cur = assign.get(v)
            if cur is not None:
                if cur != val:
                    return False
                continue
            assign[v] = val
            trail.append(v)
            for k in by_var_clause[v]:
                st, free = clause_state(clauses[k])
                if st == 0:
                    return False
                if st == -1:
                    queue.append((free[0], free[1]))
            for k in by_var_general[v]:
                if eval_partial(general[k], assign) == 0:
                    return False
        return True

    def undo(mark):
        while len(trail) > mark:
            del assign[trail.pop()]

    def pick():
        best, best_n = None, None
        for cl in clauses:
            st, free = clause_state(cl)
            if st < 0 and (best_n is None or -st < best_n):
                best_n = -st
                best = next(v for v, _ in cl if v not in assign)
                if best_n <= 2:
                    break
        if best is not None:
            return best
        for v in order:
            if v not in assign:
                return v
        return None

    # initial units
    for cl in clauses:
        if len(cl) == 1 and not set_and_propagate(cl[0][0], cl[0][1]):
            return SatResult("UNSAT", None, 0)
        if not cl:
            return SatResult("UNSAT", None, 0)
    for g in general:
        if eval_partial(g, assign) == 0:
            return SatResult("UNSAT", None, 0)

    class _Limit(Exception):
        pass

    def search():
        nonlocal nodes
        v = pick()
        if v is None:
            return all(eval_partial(g, assign) == 1 for g in general)
        for val in (0, 1):
            nodes += 1
            if nodes > node_limit:
                raise _Limit
            mark = len(trail)
            if set_and_propagate(v, val) and search():
                return True
            undo(mark)
        return False

    try:
        found = search()
    except _Limit:
        return SatResult("UNKNOWN", None, nodes)
    if not found:
        return SatResult("UNSAT", None, nodes)
    full = {v: assign.get(v, 0) for v in order}
    assert all(eval_formula(c, full) for c in conj)
    return SatResult("SAT", full, nodes)


# -- finite GCP structures ----------------------------------------------------

@dataclass
class GcpStructure:
    """Finite sets P, Q1, Q2, R1, R2 with relations M0, M1, M2.

    Elements of (P x Q) ⊔ R are written ("pq", p, q) and ("r", r).
    """

    P: list
    Q1: list
    Q2: list
    R1: list
    R2: list
    M0: list = field(default_factory=list)
    M1: list = field(default_factory=list)
    M2: list = field(default_factory=list)
    a: object = None
    b: object = None

    def left(self):
        return [("pq", p, q) for p in self.P for q in self.Q1] + [("r", r) for r in self.R1]

    def right(self):
        return [("pq", p, q) for p in self.P for q in self.Q2] + [("r", r) for r in self.R2]


def _norm_elem(x):
    return tuple(x) if isinstance(x, list) else x


def _is_bijection(pairs, dom, cod):
    dom, cod = list(dom), list(cod)
    fwd, bwd = {}, {}
    for x, y in pairs:
        if x in fwd or y in bwd:
            return False
        fwd[x] = y
        bwd[y] = x
    return set(fwd) == set(dom) and set(bwd) == set(cod)


def _is_injection_missing(pairs, dom, cod, missing):
    fwd, bwd = {}, {}
    for x, y in pairs:
        if x in fwd or y in bwd:
            return False
        fwd[x] = y
        bwd[y] = x
    return set(fwd) == set(dom) and missing in set(cod) and missing not in bwd


def check_gcp(s: GcpStructure) -> dict:
    """Check the three GCP conditions.

    Returns {"conditions": {1: bool, 2: bool, 3: bool}, "violated": bool}.
    ``violated`` is true when all three hold, i.e. the structure violates
    the principle.  Malformed relations raise ValueError.
    """
    left = [_norm_elem(x) for x in s.left()]
    right = [_norm_elem(x) for x in s.right()]
    M0 = [(_norm_elem(x), _norm_elem(y)) for x, y in s.M0]
    lset, rset = set(left), set(right)
    for x, y in M0:
        if x not in lset or y not in rset:
            raise ValueError(f"M0 pair {(x, y)} outside (PxQ1)+R1 x (PxQ2)+R2")
    for x, y in s.M1:
        if x not in set(s.R1) or y not in set(s.R2):
            raise ValueError(f"M1 pair {(x, y)} outside R1 x R2")
    for x, y in s.M2:
        if x not in set(s.R2) or y not in set(s.P):
            raise ValueError(f"M2 pair {(x, y)} outside R2 x P")
    c1 = _is_bijection(M0, left, right)
    c2 = s.a is not None and _is_injection_missing(s.M1, s.R1, s.R2, s.a)
    c3 = s.b is not None and _is_injection_missing(s.M2, s.R2, s.P, s.b)
    conds = {1: c1, 2: c2, 3: c3}
    return {"conditions": conds, "violated": all(conds.values())}


def count_variables(principle: str, **params) -> int:
    """Closed-form variable counts, used as a cross-check in tests."""
    if principle == "count":
        return comb(params["n"], params["p"])
    if principle in ("injphp", "ontophp", "modphp"):
        return params["m"] * params["n"]
    if principle == "ucp":
        return params["l"] * params["d"] * params["n"]
    if principle == "oddtown":
        n = params["n"]
        rows = params.get("rows", n + 1)
        return 2 * rows * n + rows * comb(n, 2) + comb(rows, 2) * comb(n, 2)
    raise ParameterError(principle)


def assignment_space(variables):
    """Iterate all 0/1 assignments of ``variables``."""
    variables = list(variables)
    for bits in product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def instance_to_json(inst: PrincipleInstance) -> dict:
    return {"principle": inst.principle, "params": dict(inst.params), "active": inst.active,
            "variables": [v.label for v in inst.variables],
            "formula": formula_to_json(inst.formula)}


def instance_from_json(obj) -> PrincipleInstance:
    """Regenerate from the parameters and check the stored formula matches."""
    inst = generate(obj["principle"], **obj["params"])
    if "formula" in obj and formula_from_json(obj["formula"]) != inst.formula:
        raise ValueError("stored formula differs from the generated instance")
    return inst
