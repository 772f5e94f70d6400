"""Sparse multivariate polynomials over F_p and Z_d.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
name; the constant monomial is ``()``.  Variable names are strings such as
``x[1,2]``, ``u[3]`` or ``x[{1,2,3}]``.  Coefficients are stored reduced
into ``0 .. modulus-1`` and zero coefficients are never stored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = [
    "RingSpec",
    "Polynomial",
    "mono_mul",
    "mono_degree",
    "mono_str",
    "is_prime",
    "xvar",
    "uvar",
    "xblock",
    "parse_polynomial",
    "NEG_INF",
]

NEG_INF = float("-inf")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """``F`` (prime field F_p) or ``Z`` (integers mod d)."""

    kind: str
    modulus: int

    def __post_init__(self):
        if self.kind not in ("F", "Z"):
            raise ValueError(f"ring kind must be 'F' or 'Z', got {self.kind!r}")
        if self.kind == "F" and not is_prime(self.modulus):
            raise ValueError(f"F_{self.modulus}: modulus is not prime")
        if self.kind == "Z" and self.modulus < 2:
            raise ValueError("Z_d needs d >= 2")

    @classmethod
    def field(cls, p: int) -> "RingSpec":
        return cls("F", p)

    @classmethod
    def zmod(cls, d: int) -> "RingSpec":
        return cls("Z", d)

    @property
    def is_field(self) -> bool:
        return self.kind == "F" or is_prime(self.modulus)

    def __str__(self):
        return f"{self.kind}{self.modulus}"

    def header(self) -> str:
        return f"ring {self.kind} {self.modulus}"


def xvar(i: int, j: int) -> str:
    return f"x[{i},{j}]"


def uvar(j: int) -> str:
    return f"u[{j}]"


def xblock(e) -> str:
    return "x[{" + ",".join(str(v) for v in sorted(e)) + "}]"


def mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, k in b:
        d[v] = d.get(v, 0) + k
    return tuple(sorted(d.items()))


def mono_degree(m: tuple) -> int:
    return sum(k for _, k in m)


def mono_str(m: tuple) -> str:
    if not m:
        return "1"
    return "*".join(v if k == 1 else f"{v}^{k}" for v, k in m)


def mono_from_vars(vs: Iterable[str]) -> tuple:
    d = {}
    for v in vs:
        d[v] = d.get(v, 0) + 1
    return tuple(sorted(d.items()))


class Polynomial:
    """Immutable sparse polynomial."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: Mapping | None = None):
        mod = ring.modulus
        clean = {}
        if terms:
            for m, c in terms.items():
                c %= mod
                if c:
                    clean[m] = c
        self.ring = ring
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, ring):
        return cls(ring)

    @classmethod
    def const(cls, ring, c: int):
        return cls(ring, {(): c})

    @classmethod
    def var(cls, ring, name: str):
        return cls(ring, {((name, 1),): 1})

    @classmethod
    def monomial(cls, ring, m: tuple, c: int = 1):
        return cls(ring, {m: c})

    @classmethod
    def linear(cls, ring, names: Iterable[str], const: int = 0):
        t = {}
        for n in names:
            m = ((n, 1),)
            t[m] = t.get(m, 0) + 1
        if const:
            t[()] = t.get((), 0) + const
        return cls(ring, t)

    @classmethod
    def _raw(cls, ring, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        return p

    # arithmetic
    def _check(self, other):
        if isinstance(other, int):
            return Polynomial.const(self.ring, other)
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        mod = self.ring.modulus
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = (t.get(m, 0) + c) % mod
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return Polynomial._raw(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.modulus
        return Polynomial._raw(self.ring, {m: (-c) % mod for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c: int):
        return Polynomial(self.ring, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._check(other)
        mod = self.ring.modulus
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                t[m] = (t.get(m, 0) + c1 * c2) % mod
        return Polynomial._raw(self.ring, {m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def mul_monomial(self, mono: tuple, c: int = 1):
        mod = self.ring.modulus
        t = {}
        for m, v in self.terms.items():
            k = mono_mul(m, mono)
            t[k] = (t.get(k, 0) + v * c) % mod
        return Polynomial._raw(self.ring, {m: v for m, v in t.items() if v})

    def __pow__(self, k: int):
        out = Polynomial.const(self.ring, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.const(self.ring, other)
        return isinstance(other, Polynomial) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        """Total degree; the zero polynomial has degree -inf."""
        if not self.terms:
            return NEG_INF
        return max(mono_degree(m) for m in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((), 0)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def evaluate(self, point: Mapping) -> int:
        mod = self.ring.modulus
        total = 0
        for m, c in self.terms.items():
            v = c
            for name, k in m:
                v = v * pow(point[name], k, mod) % mod
            total += v
        return total % mod

    def substitute(self, mapping: Mapping) -> "Polynomial":
        """Replace variables by polynomials (unmapped variables stay)."""
        out = Polynomial.zero(self.ring)
        cache = {}
        for m, c in self.terms.items():
            term = Polynomial.const(self.ring, c)
            rest = []
            for name, k in m:
                if name in mapping:
                    key = (name, k)
                    if key not in cache:
                        cache[key] = mapping[name] ** k
                    term = term * cache[key]
                else:
                    rest.append((name, k))
            if rest:
                term = term.mul_monomial(tuple(rest))
            out = out + term
        return out

    def change_ring(self, ring: RingSpec) -> "Polynomial":
        return Polynomial(ring, self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-mono_degree(t[0]), t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono_str(m))
            else:
                parts.append(f"{c}*{mono_str(m)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.ring}, {self})"


_VAR = r"[A-Za-z_][A-Za-z0-9_]*(?:\[[^\]]*\])?"
_FACTOR_RE = re.compile(rf"^({_VAR})(?:\^(\d+))?$")


def _split_top(text: str, sep: str):
    depth = 0
    out, cur = [], []
    for ch in text:
        if ch in "[{(":
            depth += 1
        elif ch in "]})":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_polynomial(text: str, ring: RingSpec) -> Polynomial:
    """Parse ``2*x[1,2]*u[3] + 5*x[2,1] + 1`` (also accepts ``-`` terms)."""
    s = text.replace(" ", "")
    if s in ("", "0"):
        return Polynomial.zero(ring)
    s = s.replace("-", "+-")
    terms = {}
    for tok in _split_top(s, "+"):
        if not tok:
            continue
        sign = 1
        if tok.startswith("-"):
            sign, tok = -1, tok[1:]
        coef = 1
        mono = {}
        for f in _split_top(tok, "*"):
            if re.fullmatch(r"\d+", f):
                coef *= int(f)
                continue
            m = _FACTOR_RE.match(f)
            if not m:
                raise ValueError(f"cannot parse factor {f!r}")
            name, k = m.group(1), int(m.group(2) or 1)
            mono[name] = mono.get(name, 0) + k
        key = tuple(sorted(mono.items()))
        terms[key] = terms.get(key, 0) + sign * coef
    return Polynomial(ring, terms)


def gcd_all(xs):
    g = 0
    for x in xs:
        g = math.gcd(g, x)
    return g
