import pytest

from nsworkbench.nullstellensatz import (
    Nonconclusive,
    NSProof,
    PolySystem,
    UnsupportedRing,
    min_degree,
    monomial_of,
    project_mod,
    proof_from_text,
    proof_to_text,
    search_ns,
    substitute_u,
    system_from_text,
    system_neg_count,
    system_neg_injphp,
    system_neg_injstar,
    system_to_text,
    verify_ns,
)
from nsworkbench.partial import PartialInjection
from nsworkbench.poly import Polynomial, RingSpec, parse_polynomial

F2, F3 = RingSpec.field(2), RingSpec.field(3)


def P(ring, text):
    return parse_polynomial(text, ring)


def php21_refutation(ring):
    S = system_neg_injphp(2, 1, ring)
    pig = [n for n in S.names if n.startswith("pigeon")]
    mono = [n for n in S.names if n not in pig and not n.startswith("bool")]
    assert len(pig) == 2 and len(mono) == 1
    coeffs = {mono[0]: P(ring, "1"), pig[0]: P(ring, "-1*x[2,1]"), pig[1]: P(ring, "-1")}
    return NSProof(S, coeffs, P(ring, "1"), P(ring, "0"))


def test_system_sizes():
    assert len(system_neg_injstar(2, 1, F2)) == 6
    assert len(system_neg_injphp(2, 1, F2)) == 5
    C = system_neg_count(2, 3, F2)
    assert sum(n.startswith("cover") for n in C.names) == 3
    assert sum(n.startswith("overlap") for n in C.names) == 3
    assert sum(n.startswith("bool") for n in C.names) == 3
    assert all(f.degree() <= 2 for f in system_neg_injstar(3, 2, F3).polys)


def test_cover_sum_over_f2_is_one():
    C = system_neg_count(2, 3, F2)
    total = sum((C[n] for n in C.names if n.startswith("cover")), Polynomial.zero(F2))
    assert total == P(F2, "1")


def test_verify_examples():
    f = P(F2, "x[1,1]")
    S = PolySystem(F2, ["f"], [f])
    assert verify_ns(NSProof(S, {"f": P(F2, "1")}, f, P(F2, "0"))).valid
    assert not verify_ns(NSProof(S, {"f": P(F2, "1")}, P(F2, "1"), P(F2, "0"))).valid
    for ring in (F2, F3):
        v = verify_ns(php21_refutation(ring))
        assert v.valid and v.degree == 1


def test_search_examples():
    S = system_neg_injphp(2, 1, F2)
    assert search_ns(S, 1, 0, 0) is None
    pr = search_ns(S, 1, 0, 1)
    assert verify_ns(pr).valid and pr.degree() <= 1
    pr = search_ns(system_neg_count(2, 3, F2), 1, 0, 0)
    assert verify_ns(pr).valid and pr.degree() == 0
    with pytest.raises(UnsupportedRing):
        search_ns(system_neg_injphp(2, 1, RingSpec.zmod(6)), 1, 0, 1)


def test_min_degree_examples():
    assert min_degree(system_neg_count(2, 3, F2), 4) == 0
    assert min_degree(system_neg_injphp(2, 1, F3), 4) == 1
    assert min_degree(system_neg_injphp(4, 3, F2), 4) >= min_degree(system_neg_injphp(3, 2, F2), 4)


def test_substitute_u():
    ring = RingSpec.zmod(2)
    pr = search_ns(system_neg_injstar(2, 1, F2), 1, 0, 2)
    plain = substitute_u(pr)
    assert verify_ns(plain).valid
    assert plain.system.meta["kind"] == "neg-injphp"
    S = system_neg_injstar(2, 1, ring)
    h = {"hole(1)": P(ring, "u[1]")}
    pr = NSProof(S, h, P(ring, "u[1]") * S["hole(1)"], P(ring, "0"))
    assert verify_ns(pr).valid
    out = substitute_u(pr)
    assert verify_ns(out).valid
    assert all("u[" not in str(q) for q in list(out.coeffs.values()) + [out.g1, out.g2])


def test_project_mod():
    ring = RingSpec.zmod(6)
    S = PolySystem(ring, ["f"], [P(ring, "3")])
    pr = NSProof(S, {"f": P(ring, "1")}, P(ring, "3"), P(ring, "0"))
    assert verify_ns(pr).valid
    two = project_mod(pr, 2)
    assert two.ring == RingSpec("Z", 2) or two.ring == RingSpec.field(2)
    assert verify_ns(two).valid and two.refuted_constant() == 1
    with pytest.raises(Nonconclusive):
        project_mod(pr, 3)


def test_monomial_of():
    ring = RingSpec.zmod(2)
    assert monomial_of(PartialInjection(), ring) == P(ring, "1")
    assert monomial_of(PartialInjection.of([(1, 1)]), ring) == P(ring, "x[1,1]")
    assert monomial_of(PartialInjection.of([(1, 1)], [2]), ring) == P(ring, "x[1,1]*u[2]")


def test_text_roundtrip():
    S = system_neg_injstar(3, 2, RingSpec.zmod(6))
    assert system_to_text(system_from_text(system_to_text(S))) == system_to_text(S)
    pr = php21_refutation(F3)
    again = proof_from_text(proof_to_text(pr))
    assert proof_to_text(again) == proof_to_text(pr) and verify_ns(again).valid


def test_backends_agree():
    import numpy as np

    from nsworkbench import linalg

    rng = np.random.default_rng(0)
    for p in (2, 3, 5):
        for _ in range(10):
            A = rng.integers(0, p, size=(12, 15), dtype=np.int64)
            outs = {b: (linalg.rref(M := A.copy(), p, backend=b), M) for b in linalg.BACKENDS}
            piv = [v[0] for v in outs.values()]
            mats = [v[1] for v in outs.values()]
            assert all(x == piv[0] for x in piv) and all((m == mats[0]).all() for m in mats)
    old = linalg.BACKEND
    try:
        linalg.set_backend("python")
        assert min_degree(system_neg_injphp(3, 2, F3), 4) == 2
    finally:
        linalg.set_backend(old)
