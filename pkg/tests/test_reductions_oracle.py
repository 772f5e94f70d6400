import json

from nsworkbench.formulas import eval_formula
from nsworkbench.nullstellensatz import system_neg_injphp
from nsworkbench.oracle import oracle_min_degree, oracle_represents, oracle_taut, read_ledger
from nsworkbench.partial import InjUniverse, PartialInjection
from nsworkbench.poly import RingSpec
from nsworkbench.principles import generate
from nsworkbench.reductions import (
    RULES,
    Witness,
    certify,
    check_contract,
    enumerate_witnesses,
    lower,
    perfect_matchings,
    reports_to_csv,
    transform,
    violations,
)
from nsworkbench.trees import leaf, query_tree


def identity(principle, n, **extra):
    return Witness.make(principle, {"pairs": tuple((i, i) for i in range(1, n + 1))}, m=n, n=n, **extra)


def test_ucp_from_count_example():
    w = Witness.make("count", {"blocks": ((1, 2), (3, 4))}, p=2, n=4)
    out = transform("ucp_from_count", w)
    assert out.p["l"] == 25 and out.p["d"] == 2
    sizes = sorted(len(s) for s in out.data["sets"])
    assert sizes.count(2) == 2 and sizes.count(0) == 23
    inst, a = lower(out)
    assert all(eval_formula(c, a) for c in inst.matrix)


def test_injection_examples():
    out = transform("oddtown_from_injection", identity("injphp", 3))
    assert out.data["sets"] == ((1,), (2,), (3,)) and violations(out) == []
    out = transform("fie_from_injection", identity("injphp", 2))
    assert len(set(out.data["sets"])) == 2 and violations(out) == []


def test_ontophp_from_modphp_example():
    w = Witness.make("modphp", {"pairs": ((1, 1), (2, 2))}, d=2, m=2, n=2)
    out = transform("ontophp_from_modphp", w)
    assert out.principle == "ontophp" and violations(out) == []


def test_certify_examples():
    rep = certify("ucp_from_count", {"p": 2, "n": 4})
    assert rep.ok and rep.checked == 3
    rep = certify("oddtown_from_injection", {"m": 3, "n": 3})
    assert rep.ok and rep.checked == 6
    for m in (1, 2):
        assert certify("gcp_from_injection", {"m": m, "n": 2}).ok
    partial = certify("oddtown_from_injection", {"m": 3, "n": 3}, bound=2)
    assert partial.coverage.startswith("partial")
    assert reports_to_csv([rep]).splitlines()[0] == "rule,scale,witnesses,violations,coverage"


def test_witness_json_roundtrip():
    for rule in RULES.values():
        src = rule.source
        params = {"count": {"p": 2, "n": 4}, "injphp": {"m": 2, "n": 2}, "ontophp": {"m": 2, "n": 2},
                  "modphp": {"d": 2, "m": 2, "n": 2}, "ucp": {"l": 2, "d": 2, "n": 2},
                  "oddtown": {"n": 2, "rows": 2}}[src]
        if rule.name == "oddtownprime_from_2partition":
            params = {"p": 2, "n": 8}  # needs at least four blocks
        w = next(enumerate_witnesses(src, **params))
        out = transform(rule.name, w)
        for x in (w, out):
            assert Witness.from_json(json.loads(json.dumps(x.to_json()))) == x
        assert check_contract(rule.name, w) == []


def test_perfect_matchings():
    assert len(list(perfect_matchings(range(1, 5)))) == 3
    assert len(list(perfect_matchings(range(1, 7)))) == 15


def test_oracle_examples():
    assert oracle_taut(generate("injphp", m=2, n=1))
    assert oracle_taut(generate("count", p=2, n=4))
    from nsworkbench.formulas import big_and
    assert not oracle_taut(big_and(generate("count", p=2, n=4).matrix))
    assert oracle_min_degree(("neg-count", {"p": 2, "elements": [1, 2, 3]}, 2), 4) == 0
    assert oracle_min_degree(system_neg_injphp(2, 1, RingSpec.field(2)), 4) == 1
    ledger = read_ledger()
    assert ledger["neg-injphp M=3 m=2 F3"] == oracle_min_degree(system_neg_injphp(3, 2, RingSpec.field(3)), 4)


def test_oracle_represents_examples():
    U = InjUniverse.standard(2, 2)
    assert oracle_represents(leaf(U, 1), [PartialInjection()])
    assert oracle_represents(leaf(U, 0), [])
    T = query_tree(U, ("pigeon", 1), lambda a: 1 if a == (1, 2) else 0)
    assert oracle_represents(T, [PartialInjection.of([(1, 2)])])
    assert not oracle_represents(T, [PartialInjection.of([(1, 1)])])
