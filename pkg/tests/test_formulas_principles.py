import json
from itertools import product

import pytest

from nsworkbench.formulas import (
    FALSE,
    TRUE,
    Const,
    Not,
    Or,
    big_or,
    eval_formula,
    formula_from_json,
    formula_to_json,
    parse_var_name,
    substitute,
    var,
)
from nsworkbench.principles import (
    GcpStructure,
    ParameterError,
    check_gcp,
    count_variables,
    generate,
    instance_from_json,
    instance_to_json,
    sat_matrix,
)


def satisfying(inst):
    vs = inst.variables
    return [a for bits in product((0, 1), repeat=len(vs))
            for a in [dict(zip(vs, bits))] if all(eval_formula(c, a) for c in inst.matrix)]


def test_count_divisible_is_constant_one():
    assert generate("count", p=2, n=4).formula == TRUE


def test_count_variables():
    assert len(generate("count", p=2, n=3).variables) == 3


def test_injphp_2_1_tautology():
    inst = generate("injphp", m=2, n=1)
    assert len(inst.variables) == 2
    assert all(eval_formula(inst.formula, dict(zip(inst.variables, b))) for b in product((0, 1), repeat=2))


def test_ucp_1_2_1_unsat():
    inst = generate("ucp", l=1, d=2, n=1)
    assert {v.label for v in inst.variables} == {"r[1,1,1]", "r[1,2,1]"}
    assert satisfying(inst) == []


def test_matrix_sizes():
    assert len(generate("count", p=2, n=3).matrix) == 6
    m4 = generate("count", p=2, n=4)
    assert len(m4.variables) == 6
    assert generate("injphp", m=3, n=3).matrix and generate("injphp", m=3, n=3).formula == TRUE


def test_eval_examples():
    x = var("x")
    assert eval_formula(TRUE, {}) == 1
    assert eval_formula(Not(Or((x,))), {x: 0}) == 1
    inst = generate("count", p=2, n=3)
    assert eval_formula(inst.formula, {v: 0 for v in inst.variables}) == 1


def test_sat_examples():
    res = sat_matrix(generate("count", p=2, n=4))
    assert res.status == "SAT"
    ones = sorted(v.label for v, b in res.assignment.items() if b)
    assert len(ones) == 2
    assert sat_matrix(generate("count", p=2, n=3)).status == "UNSAT"
    res = sat_matrix(generate("injphp", m=3, n=3))
    assert res.status == "SAT" and sum(res.assignment.values()) == 3


def test_sat_unknown_on_budget():
    assert sat_matrix(generate("injphp", m=5, n=4), node_limit=1).status == "UNKNOWN"


@pytest.mark.parametrize("pr,params", [("count", {"p": 2, "n": 5}), ("injphp", {"m": 3, "n": 2}),
                                       ("ucp", {"l": 2, "d": 2, "n": 3}), ("ontophp", {"m": 3, "n": 2})])
def test_sat_agrees_with_enumeration(pr, params):
    inst = generate(pr, **params)
    if len(inst.variables) > 16:
        pytest.skip("too large to enumerate")
    assert (sat_matrix(inst).status == "SAT") == bool(satisfying(inst))


def test_substitute():
    x, y = var("x"), var("y")
    assert substitute(x, {x: TRUE}) == TRUE
    assert substitute(Not(x), {x: y}) == Not(y)


def test_parameter_errors():
    with pytest.raises(ParameterError):
        generate("count", p=0, n=3)
    with pytest.raises(ParameterError):
        generate("nosuch", n=1)


def test_deterministic_and_json_roundtrip():
    for pr, params in [("count", {"p": 3, "n": 4}), ("fie", {"n": 2}), ("oddtown", {"n": 2}),
                       ("modphp", {"d": 2, "m": 3, "n": 2})]:
        a, b = generate(pr, **params), generate(pr, **params)
        assert a == b
        obj = json.loads(json.dumps(instance_to_json(a)))
        assert instance_from_json(obj) == a
        assert formula_from_json(formula_to_json(a.formula)) == a.formula


def test_var_names():
    assert parse_var_name("r[{1,3}]") == var("r", (1, 3))
    assert parse_var_name("rr[1,2,{1,3}]") == var("rr", 1, 2, (1, 3))
    assert var("s", 2, 1).label == "s[2,1]"


def test_variable_counts():
    for pr, params in [("count", {"p": 2, "n": 5}), ("ucp", {"l": 2, "d": 3, "n": 4}),
                       ("oddtown", {"n": 3}), ("injphp", {"m": 4, "n": 3})]:
        assert len(generate(pr, **params).variables) == count_variables(pr, **params)


def test_gcp_examples():
    empty = check_gcp(GcpStructure([], [], [], [], []))["conditions"]
    assert not empty[2] and not empty[3]
    s = GcpStructure(P=[1, 2], Q1=[1], Q2=[1], R1=[], R2=[1],
                     M0=[(("pq", 1, 1), ("pq", 1, 1)), (("pq", 2, 1), ("pq", 2, 1))],
                     M1=[], M2=[(1, 1)], a=1, b=2)
    # sides have 2 and 3 elements, so no M0 is a bijection; M1 and M2 are fine
    assert check_gcp(s)["conditions"] == {1: False, 2: True, 3: True}
    t = GcpStructure(P=[1, 2], Q1=[1], Q2=[1], R1=[], R2=[],
                     M0=[(("pq", 1, 1), ("pq", 1, 1)), (("pq", 2, 1), ("pq", 2, 1))])
    assert check_gcp(t)["conditions"][1]
    t.M0 = t.M0[:1]
    assert not check_gcp(t)["conditions"][1]


def test_constants_and_big_or():
    assert isinstance(FALSE, Const) and FALSE.value == 0
    assert len(big_or([var("a"), var("b")]).children) == 2
