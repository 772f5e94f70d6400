"""Independent brute-force ground truth.

Nothing here imports the package's polynomial, reduction, search or tree
code.  Systems are rebuilt from their parameters with a separate
multilinear polynomial type (frozenset monomials), the monomial generators
stay explicit unknowns, and the linear algebra is a separate dense rank
computation.  Formulas and trees are read as plain data.

Run ``python -m nsworkbench.oracle`` to regenerate the CSV ledger.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

__all__ = [
    "OracleResult",
    "oracle_taut",
    "oracle_min_degree",
    "oracle_represents",
    "oracle_system",
    "LEDGER_PATH",
    "build_ledger",
]

LEDGER_PATH = Path(__file__).with_name("data") / "oracle_ledger.csv"
MAX_TAUT_VARS = 24


@dataclass
class OracleResult:
    query: str
    value: object
    method: str
    runtime: float


# -- tautology by truth table ---------------------------------------------------

def _formula_vars(f, acc):
    kind = type(f).__name__
    if kind == "Var":
        acc.add((f.name, f.index))
    elif kind == "Not":
        _formula_vars(f.child, acc)
    elif kind == "Or":
        for c in f.children:
            _formula_vars(c, acc)
    return acc


def _table(f, cols, n):
    kind = type(f).__name__
    if kind == "Const":
        return np.full(n, bool(f.value))
    if kind == "Var":
        return cols[(f.name, f.index)]
    if kind == "Not":
        return ~_table(f.child, cols, n)
    out = np.zeros(n, dtype=bool)
    for c in f.children:
        out |= _table(c, cols, n)
    return out


def oracle_taut(formula_or_instance, chunk_bits: int = 20) -> bool:
    """True iff every assignment satisfies the formula (exhaustive)."""
    f = getattr(formula_or_instance, "formula", formula_or_instance)
    names = sorted(_formula_vars(f, set()), key=repr)
    k = len(names)
    if k > MAX_TAUT_VARS:
        raise OverflowError(f"{k} variables exceeds the oracle limit of {MAX_TAUT_VARS}")
    low = min(k, chunk_bits)
    n = 1 << low
    idx = np.arange(n, dtype=np.int64)
    base = {nm: ((idx >> b) & 1).astype(bool) for b, nm in enumerate(names[:low])}
    for hi in range(1 << (k - low)):
        cols = dict(base)
        for b, nm in enumerate(names[low:]):
            cols[nm] = np.full(n, bool((hi >> b) & 1))
        if not _table(f, cols, n).all():
            return False
    return True


# -- Nullstellensatz degree by dense linear algebra ---------------------------------

def _ml_mul(a: dict, b: dict, p: int) -> dict:
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = m1 | m2
            out[m] = (out.get(m, 0) + c1 * c2) % p
    return {m: c for m, c in out.items() if c}


def oracle_system(kind: str, params: dict, p: int):
    """Rebuild a system as (variables, generators) with multilinear dict
    polynomials; boolean rows are implicit in the multilinear arithmetic."""
    gens = []
    if kind in ("neg-injphp", "neg-injstar"):
        P = list(params["pigeons"])
        H = list(params["holes"])
        xs = [("x", i, j) for i in P for j in H]
        variables = list(xs)
        for i in P:
            for j, j2 in combinations(H, 2):
                gens.append({frozenset({("x", i, j), ("x", i, j2)}): 1})
        for j in H:
            for i, i2 in combinations(P, 2):
                gens.append({frozenset({("x", i, j), ("x", i2, j)}): 1})
        for i in P:
            g = {frozenset({("x", i, j)}): 1 for j in H}
            g[frozenset()] = p - 1
            gens.append(g)
        if kind == "neg-injstar":
            if not params.get("u_boolean"):
                raise ValueError("oracle handles the starred system only with boolean u")
            for j in H:
                variables.append(("u", j))
                g = {frozenset({("x", i, j)}): 1 for i in P}
                g[frozenset({("u", j)})] = 1
                g[frozenset()] = p - 1
                gens.append(g)
    elif kind == "neg-count":
        q = params["p"]
        E = list(params["elements"])
        blocks = list(combinations(E, q))
        variables = [("e",) + b for b in blocks]
        for v in E:
            g = {frozenset({("e",) + b}): 1 for b in blocks if v in b}
            g[frozenset()] = p - 1
            gens.append(g)
        for b, c in combinations(blocks, 2):
            if set(b) & set(c):
                gens.append({frozenset({("e",) + b, ("e",) + c}): 1})
    else:
        raise ValueError(kind)
    return variables, gens


def _rank(M: np.ndarray, p: int) -> int:
    M = M.copy() % p
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = None
        for k in range(r, rows):
            if M[k, c]:
                piv = k
                break
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), p - 2, p)) % p
        below = M[r + 1:, c].copy()
        nz = np.nonzero(below)[0] + r + 1
        if nz.size:
            M[nz] = (M[nz] - np.outer(M[nz, c], M[r])) % p
        r += 1
    return r


def _refutable(variables, gens, p, d):
    monos = [frozenset()]
    for k in range(1, d + 1):
        monos += [frozenset(c) for c in combinations(variables, k)]
    columns = []
    for g in gens:
        for m in monos:
            columns.append(_ml_mul({m: 1}, g, p))
    index = {frozenset(): 0}
    for col in columns:
        for m in col:
            index.setdefault(m, len(index))
    A = np.zeros((len(index), len(columns)), dtype=np.int64)
    for j, col in enumerate(columns):
        for m, c in col.items():
            A[index[m], j] = c
    b = np.zeros((len(index), 1), dtype=np.int64)
    b[0, 0] = 1
    return _rank(A, p) == _rank(np.hstack([A, b]), p)


def _meta_of(system):
    if isinstance(system, tuple):
        kind, params, p = system
        return kind, params, p
    meta = system.meta
    return meta["kind"], meta, system.ring.modulus


def oracle_min_degree(system, dcap: int):
    """Least refutation degree <= dcap, or None.

    ``system`` is a PolySystem (only its parameters and modulus are read)
    or a tuple (kind, params, p).
    """
    kind, params, p = _meta_of(system)
    if any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)) or p < 2:
        raise ValueError("oracle_min_degree needs a prime field")
    variables, gens = oracle_system(kind, params, p)
    for d in range(dcap + 1):
        if _refutable(variables, gens, p, d):
            return d
    return None


# -- representation, naively ----------------------------------------------------

def _raw_branches(node, path):
    if hasattr(node, "label") and not hasattr(node, "edges"):
        yield path, node.label
        return
    for atom, child in node.edges:
        yield from _raw_branches(child, path + [tuple(atom)])


def _vertices(atom, kind):
    if kind == "part":
        return {("e", v) for v in atom}
    if len(atom) == 2:
        return {("p", atom[0]), ("h", atom[1])}
    return {("h", atom[0])}


def _joint_ok(atoms, kind):
    seen = {}
    for a in set(atoms):
        for v in _vertices(a, kind):
            if v in seen and seen[v] != a:
                return False
            seen[v] = a
    return True


def oracle_represents(tree, family) -> bool:
    """Quantify over every (branch, sigma) pair directly."""
    kind = tree.universe.kind
    fam = [set(s.atoms) for s in family]
    for path, label in _raw_branches(tree.root, []):
        b = set(path)
        if label == 1:
            if not any(s <= b for s in fam):
                return False
        elif label == 0:
            for s in fam:
                if _joint_ok(list(b) + list(s), kind):
                    return False
        else:
            return False
    return True


# -- ledger --------------------------------------------------------------------

def degree_table_queries():
    """The NS degree table: (query id, kind, params, p, dcap)."""
    qs = [("neg-count p=2 M=3 F2", "neg-count", {"p": 2, "elements": [1, 2, 3]}, 2, 4)]
    for p in (2, 3):
        for n in (1, 2, 3):
            qs.append((f"neg-injphp M={n + 1} m={n} F{p}", "neg-injphp",
                       {"pigeons": list(range(1, n + 2)), "holes": list(range(1, n + 1))}, p, 4))
    qs.append(("neg-count p=3 M=4 F3", "neg-count", {"p": 3, "elements": [1, 2, 3, 4]}, 3, 4))
    qs.append(("neg-count p=2 M=5 F2", "neg-count", {"p": 2, "elements": [1, 2, 3, 4, 5]}, 2, 4))
    qs.append(("neg-count p=2 M=3 F3", "neg-count", {"p": 2, "elements": [1, 2, 3]}, 3, 4))
    qs.append(("neg-count p=3 M=4 F2", "neg-count", {"p": 3, "elements": [1, 2, 3, 4]}, 2, 4))
    qs.append(("neg-count p=2 M=5 F3", "neg-count", {"p": 2, "elements": [1, 2, 3, 4, 5]}, 3, 4))
    qs.append(("neg-count p=3 M=5 F2", "neg-count", {"p": 3, "elements": [1, 2, 3, 4, 5]}, 2, 4))
    return qs


def build_ledger(path: Path | None = None) -> list:
    rows = []
    for qid, kind, params, p, dcap in degree_table_queries():
        t = time.perf_counter()
        val = oracle_min_degree((kind, params, p), dcap)
        rows.append(OracleResult(qid, val, "dense multilinear rank, generators explicit",
                                 round(time.perf_counter() - t, 3)))
    if path is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["query", "value", "method", "runtime_s"])
        for r in rows:
            w.writerow([r.query, "UNKNOWN" if r.value is None else r.value, r.method, r.runtime])
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(buf.getvalue())
    return rows


def read_ledger(path: Path | None = None) -> dict:
    path = Path(path or LEDGER_PATH)
    out = {}
    with path.open() as fh:
        for row in csv.DictReader(fh):
            v = row["value"]
            out[row["query"]] = None if v == "UNKNOWN" else int(v)
    return out


if __name__ == "__main__":
    for r in build_ledger(LEDGER_PATH):
        print(f"{r.query:32s} {r.value}  ({r.runtime}s)")
