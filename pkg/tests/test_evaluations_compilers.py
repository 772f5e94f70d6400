import json
import random

import pytest

from nsworkbench import corpus
from nsworkbench.compilers import (
    ConstructionError,
    branch_sum_proof,
    compile_ucp_pipeline,
    write_bundle,
)
from nsworkbench.evaluations import (
    FregeProof,
    ProofLine,
    audit_proof,
    build_evaluation,
    check_evaluation,
    evaluation_from_json,
    evaluation_to_json,
    models,
    normalize_instance,
)
from nsworkbench.formulas import FALSE, TRUE, Not, Or, var
from nsworkbench.nullstellensatz import verify_ns
from nsworkbench.partial import InjUniverse
from nsworkbench.poly import RingSpec
from nsworkbench.principles import generate
from nsworkbench.trees import br, complement, leaf, query_tree, random_tree

U = InjUniverse.standard(3, 2)
r11, r21 = var("r", 1, 1), var("r", 2, 1)


def test_constants_and_variables_pass():
    ev = build_evaluation([TRUE, FALSE, r11, r21], U)
    assert check_evaluation(ev)["ok"]
    assert models(ev, TRUE) and not models(ev, FALSE)


def test_condition_5_failure():
    f = Not(r11)
    ev = build_evaluation([f], U, overrides={f: query_tree(U, ("pigeon", 1), lambda a: 1 if a == (1, 1) else 0)})
    assert ev.trees[f] != complement(ev.trees[r11])
    assert check_evaluation(ev)["failures"][5]


def test_tautological_or_is_modelled():
    f = Or((r11, Not(r11)))
    ev = build_evaluation([f], U)
    assert check_evaluation(ev)["ok"] and models(ev, f)


def test_audit_examples():
    ev = build_evaluation([TRUE], U)
    assert audit_proof(FregeProof([ProofLine(TRUE, {"logical": "true"})]), ev) == []
    target = generate("injphp", m=3, n=2).formula
    ev = build_evaluation([target], U)
    pr = FregeProof([ProofLine(target, {"rule": {"name": "given", "premises": []}})])
    assert br(ev.tree(target), 1) == [] and audit_proof(pr, ev) == [0]


def test_and_elimination_property():
    rng = random.Random(1)
    lits = [var("r", i, j) for i in (1, 2, 3) for j in (1, 2)]
    for _ in range(40):
        parts = [Or(tuple(rng.sample(lits, 2))) for _ in range(2)]
        conj = Not(Or(tuple(Not(p) for p in parts)))
        ev = build_evaluation([conj] + parts, U)
        if models(ev, conj):
            assert all(models(ev, p) for p in parts)


def test_normalize_instance():
    f = Or((r11,))
    ev = build_evaluation([f], U)
    rho, ev2 = normalize_instance(f, ev)
    assert br(ev2.tree(f), 1) == [] and br(ev2.tree(f), 0)
    assert check_evaluation(ev2)["ok"]


def test_evaluation_json_roundtrip():
    ev = corpus.load("ucp_M3_l2_d2")["evaluation"]
    obj = json.loads(json.dumps(evaluation_to_json(ev)))
    assert evaluation_from_json(obj).trees == ev.trees


def test_branch_sum_small_cases():
    ring = RingSpec.field(2)
    pr = branch_sum_proof(leaf(U), ring)
    assert verify_ns(pr).valid and pr.coeffs == {}
    pr = branch_sum_proof(query_tree(U, ("pigeon", 1)), ring)
    assert verify_ns(pr).valid and pr.degree() == 0
    rng = random.Random(0)
    V = InjUniverse.standard(4, 3)
    for _ in range(30):
        T = random_tree(V, 3, rng, labels=None)
        pr = branch_sum_proof(T, RingSpec.zmod(6))
        assert verify_ns(pr).valid


def test_corpus_cases_check():
    for name in corpus.names():
        ev = corpus.load(name)["evaluation"]
        assert check_evaluation(ev)["ok"], name


def test_ucp_pipeline_and_bundle(tmp_path):
    case = corpus.load("ucp_M3_l2_d2")
    out = compile_ucp_pipeline(case["proof"], case["evaluation"])
    rep = out["report"]
    assert rep["verified_final"] and rep["degree_final"] <= rep["bound"] <= rep["bound_2k"] + 1
    root = write_bundle(tmp_path / "b", {"final": out["final"]}, dict(out["families"].X), rep)
    man = json.loads((root / "manifest.json").read_text())
    assert {f["path"] for f in man["files"]} >= {"report.json", "certificates/final.ns"}


def test_non_ucp_falsified_line_is_rejected():
    case = corpus.load("ucp_M3_l2_d2")
    ev = case["evaluation"]
    bad = FregeProof([ProofLine(case["proof"].target, {"rule": {"name": "given", "premises": []}})])
    with pytest.raises(ConstructionError):
        compile_ucp_pipeline(bad, ev)
