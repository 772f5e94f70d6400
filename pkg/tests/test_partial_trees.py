import json
import random

import pytest

from nsworkbench.formulas import FALSE, TRUE, var
from nsworkbench.partial import (
    IncompatibleError,
    InjUniverse,
    PartialInjection,
    PUniverse,
    compatible,
    injection_from_json,
    injection_to_json,
    restrict_formula,
    subtract,
    union,
)
from nsworkbench.trees import (
    HeightError,
    br,
    branches,
    complement,
    concat,
    concat_full,
    height,
    leaf,
    query_tree,
    random_tree,
    represents,
    restrict_labeled,
    tree_from_json,
    tree_from_list,
    tree_to_json,
)

P = PartialInjection.of


def test_compatible_examples():
    assert not compatible(P([(1, "a")]), P([(1, "b")]))
    assert compatible(P([(1, "a")]), P(singles=["b"]))
    assert not compatible(P([(1, "a")]), P(singles=["a"]))


def test_union_subtract_examples():
    r = P([(1, "a")])
    assert union(r, P()) == r
    assert len(union(r, P([(2, "b")])).pairs) == 2
    u = union(r, P(singles=["b"]))
    assert u.pairs == [(1, "a")] and u.singles == ["b"]
    assert subtract(r, r) == P()
    assert subtract(P([(1, "a"), (2, "b")]), r) == P([(2, "b")])
    assert subtract(P(singles=["b"]), P()) == P(singles=["b"])
    with pytest.raises(IncompatibleError):
        union(r, P([(1, "b")]))


def test_injection_json():
    r = P([(1, "a")], ["b"])
    assert injection_to_json(r) == {"pairs": [[1, "a"]], "singles": ["b"]}
    assert injection_from_json(json.loads(json.dumps(injection_to_json(r)))) == r


def test_restrict_formula_examples():
    x = var("r", 1, 1)
    assert restrict_formula(x, P([(1, 1)])) == TRUE
    assert restrict_formula(x, P([(1, 2)])) == FALSE


def test_branch_examples():
    U = InjUniverse([1], ["a", "b"])
    assert branches(leaf(U)) == [P()]
    assert branches(query_tree(U, ("pigeon", 1))) == [P([(1, "a")]), P([(1, "b")])]
    V = InjUniverse([1, 2], ["a"])
    assert branches(query_tree(V, ("hole", "a"))) == [P([(1, "a")]), P([(2, "a")]), P(singles=["a"])]


def test_height_examples():
    U = InjUniverse.standard(2, 2)
    assert height(leaf(U)) == 0 and height(query_tree(U, ("pigeon", 1))) == 1


def test_restrict_examples():
    U = InjUniverse([1, 2], ["a", "b"])
    T = query_tree(U, ("pigeon", 1))
    L = restrict_labeled(leaf(U, 1), P([(1, "a")]))
    assert height(L) == 0 and br(L, 1) == [P()]
    assert height(restrict_labeled(T, P([(1, "a")]))) == 0
    R = restrict_labeled(T, P([(2, "a")]))
    assert branches(R) == [P([(1, "b")])]


def test_restrict_height_bound():
    U = InjUniverse.standard(3, 2)
    T = concat_full(query_tree(U, ("pigeon", 1)), query_tree(U, ("pigeon", 2)))
    assert height(T) == 2
    with pytest.raises(HeightError):
        restrict_labeled(T, P([(3, 1)]))


def test_concat_examples():
    U = InjUniverse.standard(3, 3)
    T = query_tree(U, ("pigeon", 1), {(1, 1): 1, (1, 2): 0, (1, 3): 0})
    assert concat(T, {}) == T
    S = query_tree(U, ("pigeon", 2))
    assert concat(leaf(U), {P(): S}) == S
    assert concat_full(T, leaf(U), combine=lambda outer, inner: outer) == T
    assert concat_full(leaf(U), S) == S


def test_concat_branches_property():
    rng = random.Random(5)
    U = InjUniverse.standard(4, 4)
    for _ in range(50):
        T = random_tree(U, 2, rng)
        Ub = random_tree(U, 2, rng)
        C = concat_full(T, Ub)
        bs = branches(C)
        assert height(C) <= height(T) + height(Ub)
        assert all(not a.compatible(b) for i, a in enumerate(bs) for b in bs[i + 1:])


def test_represents_examples():
    U = InjUniverse.standard(2, 2)
    assert represents(leaf(U, 1), [P()])
    assert represents(leaf(U, 0), [])
    Tr = query_tree(U, ("pigeon", 1), lambda a: 1 if a == (1, 2) else 0)
    assert represents(Tr, [P([(1, 2)])])


def test_tree_from_list_examples():
    U = InjUniverse([1, 2], ["a", "b"])
    assert tree_from_list([], U) == leaf(U, 0)
    assert tree_from_list([P()], U) == leaf(U, 1)
    F = [P([(1, "a")])]
    T = tree_from_list(F, U)
    assert represents(T, F)


def test_complement():
    U = InjUniverse.standard(2, 2)
    assert complement(leaf(U, 0)) == leaf(U, 1)
    T = random_tree(U, 2, random.Random(2))
    assert complement(complement(T)) == T
    assert br(complement(T), 1) == br(T, 0)


def test_ptree_examples():
    U = PUniverse.standard(3, 2)
    assert len(branches(leaf(U))) == 1
    got = [sorted(b.atoms) for b in branches(query_tree(U, ("elem", 1)))]
    assert got == [[(1, 2)], [(1, 3)]]
    F = [U.make_map([(1, 2)])]
    with pytest.raises(HeightError):
        tree_from_list(F, U)  # asking 1 then 2 needs height 2, [3] allows 1
    V = PUniverse.standard(4, 2)
    F = [V.make_map([(1, 2)])]
    assert represents(tree_from_list(F, V), F)


def test_tree_json_roundtrip():
    rng = random.Random(9)
    for U in (InjUniverse.standard(3, 3), PUniverse.standard(4, 2)):
        for _ in range(20):
            T = random_tree(U, 2, rng)
            assert tree_from_json(json.loads(json.dumps(tree_to_json(T)))) == T
