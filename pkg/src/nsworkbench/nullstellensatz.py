"""Polynomial systems, Nullstellensatz proofs and degree-bounded proof search.

An NS proof of g1 = g2 from a system F is a map f -> h_f with
g1 - g2 = sum_f h_f * f; its degree is max deg h_f.  Verification expands
the identity exactly.

Search works in the quotient by the boolean rows, the monomial generators
and, for the starred pigeonhole system, the products u_j x_ij (which the
hole rows put in the ideal).  The quotient has the standard monomials as a
basis: partial matchings or partial partitions, possibly times powers of
u.  A proof of degree <= d exists iff the target is a combination of the
normal forms m*f with f a remaining (linear) row and m standard of degree
<= d.  The linear system is solved over F_p and the solution is lifted
back to a literal proof by the certified reducer, which records every
rewriting step as a generator coefficient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Iterable

import numpy as np

from . import linalg
from .partial import PartialInjection, PartialPartition
from .poly import (
    NEG_INF,
    Polynomial,
    RingSpec,
    is_prime,
    mono_degree,
    mono_mul,
    parse_polynomial,
    uvar,
    xblock,
    xvar,
)

__all__ = [
    "PolySystem",
    "NSProof",
    "VerifyResult",
    "UnsupportedRing",
    "Nonconclusive",
    "system_neg_injstar",
    "system_neg_injphp",
    "system_neg_count",
    "verify_ns",
    "Reducer",
    "search_ns",
    "min_degree",
    "substitute_u",
    "project_mod",
    "monomial_of",
    "proof_to_text",
    "proof_from_text",
    "system_to_text",
    "system_from_text",
]


class UnsupportedRing(ValueError):
    """Degree-bounded search is only implemented over prime fields."""


class Nonconclusive(ValueError):
    """The refuted constant vanishes in the chosen ring component."""


@dataclass
class PolySystem:
    ring: RingSpec
    names: list
    polys: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) != len(set(self.names)):
            raise ValueError("duplicate generator names")
        for p in self.polys:
            if p.ring != self.ring:
                raise ValueError("generator over a different ring")
        self._index = dict(zip(self.names, self.polys))

    def __getitem__(self, name):
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def __len__(self):
        return len(self.names)

    def items(self):
        return zip(self.names, self.polys)

    def variables(self) -> set:
        out = set()
        for p in self.polys:
            out |= p.variables()
        return out

    def change_ring(self, ring: RingSpec) -> "PolySystem":
        return PolySystem(ring, list(self.names), [p.change_ring(ring) for p in self.polys],
                          dict(self.meta))


def _check_sizes(pigeons, holes):
    if len(pigeons) <= len(holes):
        raise ValueError(f"need more pigeons than holes, got {len(pigeons)} <= {len(holes)}")
    if not holes:
        raise ValueError("need at least one hole")


def _php_rows(ring, pigeons, holes):
    names, polys = [], []
    x = lambda i, j: Polynomial.var(ring, xvar(i, j))
    for i in pigeons:
        for j in holes:
            names.append(f"bool({xvar(i, j)})")
            polys.append(x(i, j) * x(i, j) - x(i, j))
    for i in pigeons:
        for j, j2 in combinations(holes, 2):
            names.append(f"func({i};{j},{j2})")
            polys.append(Polynomial.monomial(ring, ((xvar(i, j), 1), (xvar(i, j2), 1))
                                             if xvar(i, j) < xvar(i, j2)
                                             else ((xvar(i, j2), 1), (xvar(i, j), 1))))
    for j in holes:
        for i, i2 in combinations(pigeons, 2):
            names.append(f"inj({i},{i2};{j})")
            a, b = sorted((xvar(i, j), xvar(i2, j)))
            polys.append(Polynomial.monomial(ring, ((a, 1), (b, 1))))
    for i in pigeons:
        names.append(f"pigeon({i})")
        polys.append(Polynomial.linear(ring, [xvar(i, j) for j in holes], -1))
    return names, polys


def system_neg_injstar(M: int, m: int, ring: RingSpec, *, pigeons=None, holes=None,
                       u_boolean: bool = False) -> PolySystem:
    """The system not-inj*PHP^M_m: x^2-x, x_ij x_ij', x_ij x_i'j, pigeon rows
    sum_j x_ij - 1 and hole rows sum_i x_ij + u_j - 1.

    ``u_boolean`` adds u_j^2 - u_j rows; this departs from the displayed
    system and is off by default.
    """
    pigeons = sorted(pigeons) if pigeons is not None else list(range(1, M + 1))
    holes = sorted(holes) if holes is not None else list(range(1, m + 1))
    _check_sizes(pigeons, holes)
    names, polys = _php_rows(ring, pigeons, holes)
    for j in holes:
        names.append(f"hole({j})")
        polys.append(Polynomial.linear(ring, [xvar(i, j) for i in pigeons] + [uvar(j)], -1))
    if u_boolean:
        for j in holes:
            u = Polynomial.var(ring, uvar(j))
            names.append(f"bool({uvar(j)})")
            polys.append(u * u - u)
    meta = {"kind": "neg-injstar", "pigeons": pigeons, "holes": holes, "u_boolean": u_boolean}
    return PolySystem(ring, names, polys, meta)


def system_neg_injphp(M: int, m: int, ring: RingSpec, *, pigeons=None, holes=None) -> PolySystem:
    """not-injPHP^M_m: the boolean rows, x_ij x_ij', x_ij x_i'j and the
    pigeon rows (no u variables)."""
    pigeons = sorted(pigeons) if pigeons is not None else list(range(1, M + 1))
    holes = sorted(holes) if holes is not None else list(range(1, m + 1))
    _check_sizes(pigeons, holes)
    names, polys = _php_rows(ring, pigeons, holes)
    meta = {"kind": "neg-injphp", "pigeons": pigeons, "holes": holes}
    return PolySystem(ring, names, polys, meta)


def system_neg_count(p: int, M: int, ring: RingSpec, *, elements=None) -> PolySystem:
    """not-Count^p_M: cover rows sum_{e containing v} x_e - 1, products
    x_e x_e' of overlapping blocks, and x_e^2 - x_e."""
    elements = sorted(elements) if elements is not None else list(range(1, M + 1))
    if len(elements) % p == 0:
        raise ValueError(f"{p} divides the universe size {len(elements)}")
    blocks = [tuple(c) for c in combinations(elements, p)]
    names, polys = [], []
    for v in elements:
        names.append(f"cover({v})")
        polys.append(Polynomial.linear(ring, [xblock(e) for e in blocks if v in e], -1))
    for e, f in combinations(blocks, 2):
        if set(e) & set(f):
            a, b = sorted((xblock(e), xblock(f)))
            names.append(f"overlap({_bstr(e)};{_bstr(f)})")
            polys.append(Polynomial.monomial(ring, ((a, 1), (b, 1))))
    for e in blocks:
        x = Polynomial.var(ring, xblock(e))
        names.append(f"bool({xblock(e)})")
        polys.append(x * x - x)
    meta = {"kind": "neg-count", "p": p, "elements": elements}
    return PolySystem(ring, names, polys, meta)


def _bstr(e):
    return "{" + ",".join(map(str, e)) + "}"


def system_for_meta(meta: dict, ring: RingSpec) -> PolySystem:
    kind = meta["kind"]
    if kind == "neg-injstar":
        return system_neg_injstar(0, 0, ring, pigeons=meta["pigeons"], holes=meta["holes"],
                                  u_boolean=meta.get("u_boolean", False))
    if kind == "neg-injphp":
        return system_neg_injphp(0, 0, ring, pigeons=meta["pigeons"], holes=meta["holes"])
    if kind == "neg-count":
        return system_neg_count(meta["p"], 0, ring, elements=meta["elements"])
    raise ValueError(f"unknown system kind {kind!r}")


# -- proofs -------------------------------------------------------------------

@dataclass
class NSProof:
    system: PolySystem
    coeffs: dict  # generator name -> Polynomial
    g1: Polynomial
    g2: Polynomial
    note: dict = field(default_factory=dict)

    @property
    def ring(self):
        return self.system.ring

    def degree(self):
        return max((h.degree() for h in self.coeffs.values()), default=NEG_INF)

    def refuted_constant(self):
        """c when this proves c = 0 for a constant c, else None."""
        diff = self.g1 - self.g2
        if diff.is_constant():
            return diff.constant_term()
        return None


@dataclass
class VerifyResult:
    valid: bool
    degree: float
    residual: Polynomial | None = None

    def __bool__(self):
        return self.valid


def verify_ns(proof: NSProof) -> VerifyResult:
    """Exact check of g1 - g2 = sum_f h_f f."""
    sys_ = proof.system
    ring = sys_.ring
    for name, h in proof.coeffs.items():
        if name not in sys_:
            raise ValueError(f"coefficient for unknown generator {name!r}")
        if h.ring != ring:
            raise ValueError("coefficient over a different ring")
    if proof.g1.ring != ring or proof.g2.ring != ring:
        raise ValueError("g1/g2 over a different ring")
    total = {}
    mod = ring.modulus
    for name, h in proof.coeffs.items():
        f = sys_[name]
        for m1, c1 in h.terms.items():
            for m2, c2 in f.terms.items():
                k = mono_mul(m1, m2)
                total[k] = (total.get(k, 0) + c1 * c2) % mod
    residual = (proof.g1 - proof.g2) - Polynomial(ring, total)
    return VerifyResult(residual.is_zero(), proof.degree(), None if residual.is_zero() else residual)


def monomial_of(rho, ring: RingSpec) -> Polynomial:
    """x_rho: product of x[i,j] over pairs and u[j] over singletons, or of
    x[{e}] over the blocks of a partial partition."""
    if isinstance(rho, PartialPartition):
        m = tuple(sorted((xblock(e), 1) for e in rho.atoms))
    else:
        vs = [xvar(i, j) for i, j in rho.pairs] + [uvar(j) for j in rho.singles]
        m = tuple(sorted((v, 1) for v in vs))
    return Polynomial.monomial(ring, m)


def mono_of(rho) -> tuple:
    if isinstance(rho, PartialPartition):
        return tuple(sorted((xblock(e), 1) for e in rho.atoms))
    vs = [xvar(i, j) for i, j in rho.pairs] + [uvar(j) for j in rho.singles]
    return tuple(sorted((v, 1) for v in vs))


# -- certified reduction --------------------------------------------------------

class Reducer:
    """Normal forms modulo boolean rows, monomial generators and (for the
    starred system) the products u_j x_ij, with certificates.

    ``reduce(P)`` returns (N, cert) with P - N = sum cert[f] * f exactly.
    """

    def __init__(self, system: PolySystem):
        self.system = system
        self.ring = system.ring
        self.bool_rows = {}
        self.mono_gens = {}  # var -> list of (monomial dict, name, inverse coeff)
        mod = self.ring.modulus
        for name, f in system.items():
            t = f.terms
            if len(t) == 2:
                items = sorted(t.items(), key=lambda kv: -mono_degree(kv[0]))
                (m2, c2), (m1, c1) = items
                if (len(m2) == 1 and m2[0][1] == 2 and m1 == ((m2[0][0], 1),)
                        and c2 == 1 and c1 == mod - 1):
                    self.bool_rows[m2[0][0]] = name
                    continue
            if len(t) == 1:
                (m, c), = t.items()
                if gcd(c, mod) == 1 and m:
                    inv = pow(c, -1, mod)
                    for v, _ in m:
                        self.mono_gens.setdefault(v, []).append((dict(m), name, inv))
        self.u_rules = {}
        meta = system.meta
        if meta.get("kind") == "neg-injstar":
            pigeons = meta["pigeons"]
            for j in meta["holes"]:
                self.u_rules[uvar(j)] = (j, f"hole({j})", pigeons)
        self._memo = {}

    def is_standard(self, m: tuple) -> bool:
        nf, _ = self.reduce_monomial(m)
        return nf == {m: 1}

    def _divides(self, g: dict, md: dict) -> bool:
        return all(md.get(v, 0) >= k for v, k in g.items())

    def reduce_monomial(self, m: tuple):
        """(nf, cert) for the monomial m with coefficient 1; cert maps a
        generator name to a dict monomial -> coefficient."""
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        mod = self.ring.modulus
        cert = {}

        def add(name, mono, c):
            d = cert.setdefault(name, {})
            d[mono] = (d.get(mono, 0) + c) % mod

        md = dict(m)
        # x^k -> x, one step at a time: v^k r = v^(k-2) r (v^2 - v) + v^(k-1) r
        for v, k in m:
            if v in self.bool_rows:
                while md[v] >= 2:
                    rest = dict(md)
                    rest[v] -= 2
                    add(self.bool_rows[v], _mono(rest), 1)
                    md[v] -= 1
        cur = _mono(md)
        nf = {cur: 1}
        # monomial generators kill the term
        for v in md:
            for g, name, inv in self.mono_gens.get(v, ()):
                if self._divides(g, md):
                    rest = dict(md)
                    for w, k in g.items():
                        rest[w] -= k
                    add(name, _mono(rest), inv)
                    nf = {}
                    break
            if not nf:
                break
        if nf and self.u_rules:
            done = False
            for v in md:
                rule = self.u_rules.get(v)
                if rule is None:
                    continue
                j, row, pigeons = rule
                for i in pigeons:
                    xv = xvar(i, j)
                    if md.get(xv, 0) >= 1:
                        # u_j x_ij = x_ij row_j - (x_ij^2 - x_ij) - sum_{i' != i} x_ij x_i'j
                        rest = dict(md)
                        rest[v] -= 1
                        rest[xv] -= 1
                        rmono = _mono(rest)
                        add(row, mono_mul(rmono, ((xv, 1),)), 1)
                        add(self.bool_rows[xv], rmono, -1)
                        for i2 in pigeons:
                            if i2 == i:
                                continue
                            a, b = sorted((xv, xvar(i2, j)))
                            gname = f"inj({min(i, i2)},{max(i, i2)};{j})"
                            add(gname, rmono, -1)
                        nf = {}
                        done = True
                        break
                if done:
                    break
        # the kill steps above may leave non-standard monomials inside the
        # certificate, which is harmless: certificates are ordinary coefficients
        res = (nf, {k: {mm: c for mm, c in d.items() if c} for k, d in cert.items()})
        self._memo[m] = res
        return res

    def reduce(self, P: Polynomial):
        mod = self.ring.modulus
        nf = {}
        cert = {}
        for m, c in P.terms.items():
            n1, c1 = self.reduce_monomial(m)
            for mm, v in n1.items():
                nf[mm] = (nf.get(mm, 0) + c * v) % mod
            for name, d in c1.items():
                tgt = cert.setdefault(name, {})
                for mm, v in d.items():
                    tgt[mm] = (tgt.get(mm, 0) + c * v) % mod
        return (Polynomial(self.ring, nf),
                {k: Polynomial(self.ring, d) for k, d in cert.items() if any(d.values())})

    def linear_rows(self):
        rule = set(self.bool_rows.values())
        for lst in self.mono_gens.values():
            rule |= {name for _, name, _ in lst}
        return [name for name in self.system.names if name not in rule]


def _mono(d: dict) -> tuple:
    return tuple(sorted((v, k) for v, k in d.items() if k))


def add_cert(coeffs: dict, extra: dict, ring: RingSpec, scale: int = 1):
    for name, h in extra.items():
        h = h if scale == 1 else h.scale(scale)
        coeffs[name] = coeffs[name] + h if name in coeffs else h
    return coeffs


def prune(coeffs: dict) -> dict:
    return {k: v for k, v in coeffs.items() if not v.is_zero()}


# -- degree-bounded search -----------------------------------------------------

def standard_monomials(reducer: Reducer, d: int) -> list:
    """Standard monomials of degree <= d, in a deterministic order."""
    variables = sorted(reducer.system.variables())
    bools = set(reducer.bool_rows)
    out = [()]
    frontier = [()]
    for _ in range(d):
        nxt = []
        seen = set()
        for m in frontier:
            last = m[-1][0] if m else None
            md = dict(m)
            for v in variables:
                if last is not None and v < last:
                    continue
                if v in bools and md.get(v):
                    continue
                md2 = dict(md)
                md2[v] = md2.get(v, 0) + 1
                mm = _mono(md2)
                if mm in seen:
                    continue
                if reducer.is_standard(mm):
                    seen.add(mm)
                    nxt.append(mm)
        out.extend(nxt)
        frontier = nxt
    return out


def search_ns(system: PolySystem, g1, g2, dmax: int, *, basis_cache: dict | None = None):
    """An NS proof of g1 = g2 of degree <= dmax, or None if there is none.

    Only prime fields are supported; over Z_d this raises UnsupportedRing.
    """
    ring = system.ring
    if ring.kind != "F":
        raise UnsupportedRing(f"degree-bounded search needs a prime field, got {ring}")
    if dmax < 0:
        raise ValueError("dmax must be >= 0")
    g1 = Polynomial.const(ring, g1) if isinstance(g1, int) else g1
    g2 = Polynomial.const(ring, g2) if isinstance(g2, int) else g2
    p = ring.modulus
    red = Reducer(system)
    target = g1 - g2
    t_nf, _ = red.reduce(target)
    if t_nf.is_zero():
        _, cert = red.reduce(target)
        proof = NSProof(system, prune(cert), g1, g2)
        if proof.degree() <= dmax:
            return proof
    rows = red.linear_rows()
    basis = standard_monomials(red, dmax)
    cols = []
    row_index = {}
    entries = []
    for name in rows:
        f = system[name]
        for m in basis:
            nf, _ = red.reduce(f.mul_monomial(m))
            col = len(cols)
            cols.append((name, m))
            for mm, c in nf.terms.items():
                r = row_index.setdefault(mm, len(row_index))
                entries.append((r, col, c))
    for mm in t_nf.terms:
        row_index.setdefault(mm, len(row_index))
    A = np.zeros((len(row_index), len(cols) + 1), dtype=np.int64)
    for r, c, v in entries:
        A[r, c] = (A[r, c] + v) % p
    for mm, c in t_nf.terms.items():
        A[row_index[mm], -1] = c
    sol = linalg.solve_augmented(A, p)
    if sol is None:
        return None
    coeffs = {}
    for (name, m), c in zip(cols, sol):
        if c:
            h = Polynomial.monomial(ring, m, int(c))
            coeffs[name] = coeffs[name] + h if name in coeffs else h
    combo = Polynomial.zero(ring)
    for name, h in coeffs.items():
        combo = combo + h * system[name]
    rest = target - combo
    nf, cert = red.reduce(rest)
    if not nf.is_zero():
        raise AssertionError("lifted solution does not reduce to zero")
    add_cert(coeffs, cert, ring)
    proof = NSProof(system, prune(coeffs), g1, g2, note={"columns": len(cols), "rows": len(row_index)})
    return proof


def min_degree(system: PolySystem, dcap: int, *, g1=1, g2=0):
    """Least d <= dcap admitting a refutation (proof of 1 = 0), else None."""
    for d in range(dcap + 1):
        if search_ns(system, g1, g2, d) is not None:
            return d
    return None


# -- u-substitution and modular projection ----------------------------------------

def substitute_u(proof: NSProof) -> NSProof:
    """Replace u_j by 1 - sum_i x_ij; the result is a proof over not-injPHP.

    Hole rows map to 0 and drop out.  Optional u-boolean rows map to
    s^2 - s with s = sum_i x_ij, which is re-expressed through boolean and
    injectivity rows.  The substitution is degree-preserving (u is replaced
    by a linear form); the degrees before and after are recorded in the note.
    """
    sys_ = proof.system
    if sys_.meta.get("kind") != "neg-injstar":
        raise ValueError("substitute_u needs a proof over not-inj*PHP")
    if not verify_ns(proof).valid:
        raise ValueError("input proof does not verify")
    ring = sys_.ring
    pigeons, holes = sys_.meta["pigeons"], sys_.meta["holes"]
    target = system_neg_injphp(0, 0, ring, pigeons=pigeons, holes=holes)
    mapping = {uvar(j): Polynomial.linear(ring, [xvar(i, j) for i in pigeons]).scale(-1) + 1
               for j in holes}
    coeffs = {}
    for name, h in proof.coeffs.items():
        hs = h.substitute(mapping)
        if name.startswith("hole("):
            continue
        if name.startswith("bool(u["):
            j = int(name[len("bool(u["):-2])
            for i in pigeons:
                add_cert(coeffs, {f"bool({xvar(i, j)})": hs}, ring)
            for i, i2 in combinations(pigeons, 2):
                add_cert(coeffs, {f"inj({i},{i2};{j})": hs.scale(2)}, ring)
            continue
        add_cert(coeffs, {name: hs}, ring)
    out = NSProof(target, prune(coeffs), proof.g1.substitute(mapping), proof.g2.substitute(mapping),
                  note={"degree_before": proof.degree()})
    out.note["degree_after"] = out.degree()
    return out


def prime_power_components(d: int) -> list:
    out = []
    k = 2
    while k * k <= d:
        if d % k == 0:
            q = 1
            while d % k == 0:
                d //= k
                q *= k
            out.append(q)
        k += 1
    if d > 1:
        out.append(d)
    return out


def project_mod(proof: NSProof, q: int) -> NSProof:
    """Reduce a proof over Z_d to the component Z_q, q the maximal power of a
    prime dividing d.  The ring is F_q when q is prime.

    Raises Nonconclusive when the refuted constant is 0 mod q.
    """
    ring = proof.ring
    d = ring.modulus
    if d % q or gcd(q, d // q) != 1 or len(prime_power_components(q)) != 1:
        raise ValueError(f"{q} is not a maximal prime-power divisor of {d}")
    new_ring = RingSpec("F", q) if is_prime(q) else RingSpec("Z", q)
    c = proof.refuted_constant()
    if c is not None and c % q == 0:
        raise Nonconclusive(f"refuted constant {c} vanishes mod {q}")
    sys2 = proof.system.change_ring(new_ring)
    coeffs = prune({k: h.change_ring(new_ring) for k, h in proof.coeffs.items()})
    return NSProof(sys2, coeffs, proof.g1.change_ring(new_ring), proof.g2.change_ring(new_ring),
                   note=dict(proof.note, projected_from=d))


def normalize_refutation(proof: NSProof) -> NSProof:
    """Scale a refutation of c = 0 (c a unit) to a refutation of 1 = 0."""
    c = proof.refuted_constant()
    mod = proof.ring.modulus
    if c is None or gcd(c, mod) != 1:
        raise ValueError("not a refutation of a unit constant")
    inv = pow(c, -1, mod)
    return NSProof(proof.system, {k: h.scale(inv) for k, h in proof.coeffs.items()},
                   proof.g1.scale(inv), proof.g2.scale(inv), note=dict(proof.note))


# -- text formats --------------------------------------------------------------

def system_to_text(system: PolySystem) -> str:
    lines = [system.ring.header(), "meta " + json.dumps(system.meta, sort_keys=True)]
    for name, f in system.items():
        lines.append(f"f {name}: {f}")
    return "\n".join(lines) + "\n"


def _parse_header(line):
    parts = line.split()
    if len(parts) != 3 or parts[0] != "ring":
        raise ValueError(f"bad ring header {line!r}")
    return RingSpec(parts[1], int(parts[2]))


def system_from_text(text: str) -> PolySystem:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    ring = _parse_header(lines[0])
    meta = {}
    names, polys = [], []
    for ln in lines[1:]:
        if ln.startswith("meta "):
            meta = json.loads(ln[5:])
        elif ln.startswith("f "):
            name, body = ln[2:].split(": ", 1)
            names.append(name)
            polys.append(parse_polynomial(body, ring))
    return PolySystem(ring, names, polys, meta)


def proof_to_text(proof: NSProof) -> str:
    out = [system_to_text(proof.system).rstrip("\n")]
    out.append(f"g1: {proof.g1}")
    out.append(f"g2: {proof.g2}")
    for name in proof.system.names:
        if name in proof.coeffs:
            out.append(f"h {name}: {proof.coeffs[name]}")
    return "\n".join(out) + "\n"


def proof_from_text(text: str) -> NSProof:
    system = system_from_text(text)
    ring = system.ring
    g1 = g2 = None
    coeffs = {}
    for ln in text.splitlines():
        if ln.startswith("g1: "):
            g1 = parse_polynomial(ln[4:], ring)
        elif ln.startswith("g2: "):
            g2 = parse_polynomial(ln[4:], ring)
        elif ln.startswith("h "):
            name, body = ln[2:].split(": ", 1)
            coeffs[name] = parse_polynomial(body, ring)
    if g1 is None or g2 is None:
        raise ValueError("proof text lacks g1/g2")
    return NSProof(system, coeffs, g1, g2)
