"""Command-line front end.

Exit codes: 0 success, 1 verification or contract failure, 2 usage error.
Results go to stdout in the ``--format`` rendering; timing goes to stderr.
Relative output paths are resolved under $OUTPUT_DIR when it is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import corpus
from .compilers import (
    ConstructionError,
    branch_sum_proof,
    compile_ucp_pipeline,
    fie_extract,
    jsonable,
    oddtown_extract,
    write_bundle,
)
from .evaluations import (
    audit_proof,
    check_evaluation,
    evaluation_from_json,
)
from .formulas import formula_to_json
from .nullstellensatz import (
    proof_from_text,
    proof_to_text,
    search_ns,
    system_for_meta,
    system_neg_count,
    system_neg_injphp,
    system_neg_injstar,
    system_to_text,
    verify_ns,
)
from .oracle import build_ledger, oracle_min_degree, oracle_taut
from .partial import InjUniverse, PUniverse
from .poly import RingSpec
from .principles import PRINCIPLES, ParameterError, generate, instance_to_json, sat_matrix
from .reductions import (
    CERTIFY_SCALES,
    RULES,
    ContractError,
    Witness,
    certify,
    check_contract,
    reports_to_csv,
    transform,
)
from .trees import height, labeled_branches, random_tree, tree_from_json, tree_to_json

__all__ = ["main", "run", "UsageError"]

SYSTEMS = ("neg-count", "neg-injphp", "neg-injstar")


class UsageError(ValueError):
    pass


class Result:
    """Payload plus its text and csv renderings and an exit code."""

    def __init__(self, data, text=None, rows=None, code=0):
        self.data, self.text, self.rows, self.code = data, text, rows, code

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(jsonable(self.data), sort_keys=True, indent=1) + "\n"
        if fmt == "csv":
            if isinstance(self.rows, str):
                return self.rows
            rows = self.rows
            if rows is None:
                rows = [{"key": k, "value": json.dumps(jsonable(v), sort_keys=True)}
                        for k, v in sorted(self.data.items())]
            buf = io.StringIO()
            if rows:
                w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
                w.writeheader()
                w.writerows(rows)
            return buf.getvalue()
        if self.text is not None:
            return self.text if self.text.endswith("\n") else self.text + "\n"
        return json.dumps(jsonable(self.data), sort_keys=True, indent=1) + "\n"


def _out_path(p) -> Path:
    p = Path(p)
    base = os.environ.get("OUTPUT_DIR")
    return p if p.is_absolute() or not base else Path(base) / p


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


# -- argument helpers ---------------------------------------------------------------

PARAM_FLAGS = ("p", "n", "m", "l", "d", "rows")


def _add_params(sp):
    for k in PARAM_FLAGS:
        sp.add_argument(f"--{k}", type=int)
    sp.add_argument("--reading", choices=("intended", "literal"))


def _principle_params(args) -> dict:
    need = {"count": ("p", "n"), "injphp": ("m", "n"), "ontophp": ("m", "n"),
            "modphp": ("d", "m", "n"), "ucp": ("l", "d", "n"), "oddtown": ("n",), "fie": ("n",)}
    keys = need[args.principle]
    missing = [k for k in keys if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.principle} needs --{' --'.join(missing)}")
    out = {k: getattr(args, k) for k in keys}
    if args.principle in ("oddtown", "fie") and args.rows is not None:
        out["rows"] = args.rows
    if args.principle == "fie" and args.reading:
        out["reading"] = args.reading
    return out


def _ring(args) -> RingSpec:
    if args.field is not None and args.zmod is not None:
        raise UsageError("give --field or --zmod, not both")
    if args.zmod is not None:
        return RingSpec.zmod(args.zmod)
    return RingSpec.field(2 if args.field is None else args.field)


def _add_system(sp, ring=True):
    sp.add_argument("--system", required=True, choices=SYSTEMS)
    sp.add_argument("--p", type=int, help="block size (neg-count)")
    sp.add_argument("--n", type=int, help="universe size (neg-count) or holes")
    sp.add_argument("--m", type=int, help="pigeons")
    sp.add_argument("--u-boolean", action="store_true")
    if ring:
        sp.add_argument("--field", type=int)
        sp.add_argument("--zmod", type=int)


def _system(args, ring):
    if args.system == "neg-count":
        if args.p is None or args.n is None:
            raise UsageError("neg-count needs --p and --n")
        return system_neg_count(args.p, args.n, ring)
    if args.m is None or args.n is None:
        raise UsageError(f"{args.system} needs --m (pigeons) and --n (holes)")
    if args.system == "neg-injphp":
        return system_neg_injphp(args.m, args.n, ring)
    return system_neg_injstar(args.m, args.n, ring, u_boolean=args.u_boolean)


def _case(name) -> dict:
    """A corpus case by name, or a case/evaluation JSON file."""
    if name in corpus.names():
        return corpus.load(name)
    text = _read(name)
    obj = json.loads(text)
    if "entries" in obj:
        return {"kind": None, "params": {}, "evaluation": evaluation_from_json(obj)}
    return corpus.load(str(Path(name).resolve()) if name.endswith(".json") else name)


# -- commands ---------------------------------------------------------------------

def cmd_gen(args):
    inst = generate(args.principle, **_principle_params(args))
    obj = instance_to_json(inst)
    rows = [{"variable": v} for v in obj["variables"]]
    return Result(obj, text=str(inst.formula), rows=rows)


def cmd_matrix(args):
    inst = generate(args.principle, **_principle_params(args))
    data = [formula_to_json(c) for c in inst.matrix]
    rows = [{"index": n, "conjunct": str(c)} for n, c in enumerate(inst.matrix)]
    return Result(data, text="\n".join(str(c) for c in inst.matrix), rows=rows)


def cmd_sat(args):
    inst = generate(args.principle, **_principle_params(args))
    res = sat_matrix(inst, node_limit=args.node_limit)
    assign = None
    if res.assignment is not None:
        assign = {v.label: int(b) for v, b in sorted(res.assignment.items(), key=lambda kv: kv[0].label)}
    data = {"status": res.status, "assignment": assign}
    text = res.status
    if assign:
        text += "\n" + " ".join(k for k, b in assign.items() if b)
    rows = [{"variable": k, "value": b} for k, b in (assign or {}).items()] or [{"status": res.status}]
    return Result(data, text=text, rows=rows, code=1 if res.status == "UNKNOWN" else 0)


def cmd_ns_system(args):
    S = _system(args, _ring(args))
    rows = [{"name": n, "polynomial": str(f)} for n, f in S.items()]
    data = {"ring": str(S.ring), "meta": S.meta, "generators": rows}
    return Result(data, text=system_to_text(S), rows=rows)


def _proof_result(pr, extra=None):
    v = verify_ns(pr)
    deg = pr.degree()
    data = {"valid": v.valid, "degree": deg, "ring": str(pr.ring), **(extra or {})}
    return data, v


def cmd_ns_verify(args):
    try:
        pr = proof_from_text(_read(args.file))
    except (ValueError, KeyError) as e:
        raise UsageError(f"bad proof file: {e}") from None
    data, v = _proof_result(pr)
    text = f"{'valid' if v.valid else 'INVALID'} degree {data['degree']}"
    return Result(data, text=text, code=0 if v.valid else 1)


def cmd_ns_search(args):
    S = _system(args, _ring(args))
    pr = search_ns(S, 1, 0, args.dmax)
    if pr is None:
        return Result({"found": False, "dmax": args.dmax}, text="none", code=1)
    if args.out:
        path = _out_path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(proof_to_text(pr))
    data, _ = _proof_result(pr, {"found": True})
    return Result(data, text=proof_to_text(pr))


def _refutable_at(task):
    meta, ring, d = task
    return search_ns(system_for_meta(meta, ring), 1, 0, d) is not None


def cmd_ns_mindegree(args):
    ring = _ring(args)
    S = _system(args, ring)
    if args.jobs > 1:
        tasks = [(S.meta, ring, d) for d in range(args.dcap + 1)]
        with ProcessPoolExecutor(args.jobs) as ex:
            hits = list(ex.map(_refutable_at, tasks))
        deg = next((d for d, h in enumerate(hits) if h), None)
    else:
        deg = next((d for d in range(args.dcap + 1) if search_ns(S, 1, 0, d) is not None), None)
    val = "UNKNOWN" if deg is None else deg
    return Result({"degree": val, "dcap": args.dcap}, text=str(val), rows=[{"degree": val}])


def cmd_tree(args):
    if args.file:
        T = tree_from_json(json.loads(_read(args.file)))
    else:
        a, b = args.size
        U = InjUniverse.standard(a, b) if args.kind == "inj" else PUniverse.standard(a, b)
        import random
        T = random_tree(U, args.height, random.Random(args.seed))
    data = {"tree": tree_to_json(T), "height": height(T), "branches": len(labeled_branches(T))}
    code = 0
    text = f"height {data['height']} branches {data['branches']}"
    if args.branch_sum is not None:
        pr = branch_sum_proof(T, RingSpec.field(args.branch_sum), strict=False)
        v = verify_ns(pr)
        data["branch_sum"] = {"valid": v.valid, "degree": pr.degree()}
        text += f"\nbranch-sum {'valid' if v.valid else 'INVALID'} degree {pr.degree()}"
        code = 0 if v.valid and pr.degree() <= height(T) else 1
    rows = [{"height": data["height"], "branches": data["branches"]}]
    return Result(data, text=text, rows=rows, code=code)


def cmd_eval_check(args):
    ev = _case(args.case)["evaluation"]
    rep = check_evaluation(ev)
    fails = {str(k): [str(g) for g in v] for k, v in rep["failures"].items()}
    data = {"ok": rep["ok"], "k": ev.k, "formulas": len(ev), "failures": fails}
    lines = [f"{'ok' if rep['ok'] else 'FAILED'} k={ev.k} formulas={len(ev)}"]
    lines += [f"condition {k}: {len(v)} failing" for k, v in fails.items() if v]
    rows = [{"condition": k, "failing": len(v)} for k, v in fails.items()]
    return Result(data, text="\n".join(lines), rows=rows, code=0 if rep["ok"] else 1)


def cmd_audit(args):
    case = _case(args.case)
    if "proof" not in case:
        raise UsageError(f"{args.case} carries no proof")
    bad = audit_proof(case["proof"], case["evaluation"])
    n = len(case["proof"].lines)
    data = {"lines": n, "falsified": bad}
    text = f"{len(bad)} of {n} lines falsified: {' '.join(map(str, bad))}".rstrip(": ")
    return Result(data, text=text, rows=[{"line": i} for i in bad])


def cmd_compile_ucp(args):
    case = _case(args.case)
    if "proof" not in case:
        raise UsageError(f"{args.case} carries no proof")
    try:
        out = compile_ucp_pipeline(case["proof"], case["evaluation"], args.d)
    except ConstructionError as e:
        return Result({"error": str(e)}, text=f"construction failed: {e}", code=1)
    rep = out["report"]
    if args.out:
        fam = out["families"]
        trees = {f"X{k}": t for k, t in fam.X.items()}
        trees.update({f"Y{k}": t for k, t in fam.Y.items()})
        certs = {"star": out["star"], "plain": out["plain"], "final": out["final"]}
        write_bundle(_out_path(args.out), certs, trees, rep)
    ok = rep["verified_star"] and rep["verified_plain"] and rep["verified_final"] \
        and rep["degree_final"] <= rep["bound"]
    text = "\n".join(f"{k}: {json.dumps(jsonable(v), sort_keys=True)}" for k, v in sorted(rep.items()))
    return Result(rep, text=text, code=0 if ok else 1)


def _extraction_rows(items, bound):
    rows = []
    for kind, idx, pr in items:
        v = verify_ns(pr)
        rows.append({"family": kind, "index": json.dumps(jsonable(idx)), "valid": v.valid,
                     "degree": pr.degree(), "within_bound": pr.degree() <= bound})
    return rows


def _extraction_result(rows, checks, bound, field):
    ok = all(r["valid"] and r["within_bound"] for r in rows) and all(checks.values())
    data = {"field": field, "bound": bound, "ok": ok, "certificates": rows,
            "checks": {json.dumps(jsonable(k)): v for k, v in checks.items()}}
    text = f"{'ok' if ok else 'FAILED'} F{field}: {sum(r['valid'] for r in rows)}/{len(rows)} " \
           f"certificates verify, bound {bound}, {sum(checks.values())}/{len(checks)} checks hold"
    return Result(data, text=text, rows=rows, code=0 if ok else 1)


def cmd_extract_oddtown(args):
    case = _case(args.case)
    try:
        out = oddtown_extract(case["evaluation"], case["instance"], RingSpec.field(args.field))
    except ConstructionError as e:
        return Result({"error": str(e)}, text=f"construction failed: {e}", code=1)
    return _extraction_result(_extraction_rows(out.proofs(), out.bound), out.pairing, out.bound, args.field)


def cmd_extract_fie(args):
    case = _case(args.case)
    try:
        out = fie_extract(case["evaluation"], case["instance"], RingSpec.field(args.field))
    except ConstructionError as e:
        return Result({"error": str(e)}, text=f"construction failed: {e}", code=1)
    items = [(eq, idx, pr) for (eq, idx), pr in out.proofs.items()]
    return _extraction_result(_extraction_rows(items, out.bound), out.matching, out.bound, args.field)


def cmd_reduce(args):
    try:
        w = Witness.from_json(json.loads(_read(args.witness)))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"bad witness file: {e}") from None
    try:
        out = transform(args.rule, w)
    except ContractError as e:
        return Result({"error": str(e)}, text=f"contract failure: {e}", code=1)
    bad = check_contract(args.rule, w, out)
    if args.out:
        path = _out_path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(out.to_json(), sort_keys=True) + "\n")
    data = {"rule": args.rule, "witness": out.to_json(), "violations": bad}
    text = json.dumps(out.to_json(), sort_keys=True) + "\n" + ("contract ok" if not bad else
                                                                "contract VIOLATED: " + "; ".join(bad))
    rows = [{"rule": args.rule, "violations": len(bad)}]
    return Result(data, text=text, rows=rows, code=1 if bad else 0)


def _kv(items):
    out = {}
    for it in items:
        k, sep, v = it.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {it!r}")
        try:
            out[k] = int(v)
        except ValueError:
            raise UsageError(f"--param {k} must be an integer") from None
    return out


def cmd_certify(args):
    if args.rule == "all":
        if args.param:
            raise UsageError("--param needs a single rule")
        tasks = [(r, s) for r, ss in CERTIFY_SCALES.items() for s in ss]
    elif args.param:
        tasks = [(args.rule, _kv(args.param))]
    else:
        tasks = [(args.rule, s) for s in CERTIFY_SCALES[args.rule]]
    reps = [certify(r, s, bound=args.bound, jobs=args.jobs) for r, s in tasks]
    data = [{"rule": r.rule, "scale": r.scale, "witnesses": r.checked, "violations": r.violations,
             "coverage": r.coverage} for r in reps]
    text = "\n".join(f"{'PASS' if r.ok else 'FAIL'} {r.rule} [{r.scale}] {r.coverage}, "
                     f"{len(r.violations)} violations" for r in reps)
    return Result(data, text=text, rows=reports_to_csv(reps), code=0 if all(r.ok for r in reps) else 1)


def cmd_oracle(args):
    if args.action == "taut":
        if args.principle is None:
            raise UsageError("oracle taut needs --principle")
        inst = generate(args.principle, **_principle_params(args))
        try:
            val = oracle_taut(inst)
        except OverflowError as e:
            raise UsageError(str(e)) from None
        return Result({"tautology": val}, text=str(val).lower(), rows=[{"tautology": val}])
    if args.action == "mindegree":
        if args.system is None:
            raise UsageError("oracle mindegree needs --system")
        S = _system(args, _ring(args))
        deg = oracle_min_degree(S, args.dcap)
        val = "UNKNOWN" if deg is None else deg
        return Result({"degree": val, "dcap": args.dcap}, text=str(val), rows=[{"degree": val}])
    path = _out_path(args.out) if args.out else None
    res = build_ledger(path)
    rows = [{"query": r.query, "value": "UNKNOWN" if r.value is None else r.value, "method": r.method}
            for r in res]
    return Result(rows, text="\n".join(f"{r['query']}: {r['value']}" for r in rows), rows=rows)


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--jobs", type=int, default=1)

    ap = argparse.ArgumentParser(prog="nsworkbench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, helptext):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, h in [("gen", cmd_gen, "principle instance"),
                        ("matrix", cmd_matrix, "matrix conjuncts"),
                        ("sat", cmd_sat, "satisfiability of the matrix")]:
        sp = add(name, fn, h)
        sp.add_argument("principle", choices=PRINCIPLES)
        _add_params(sp)
        if name == "sat":
            sp.add_argument("--node-limit", type=int, default=2_000_000)

    _add_system(add("ns-system", cmd_ns_system, "polynomial system"))
    sp = add("ns-verify", cmd_ns_verify, "check an NS proof file")
    sp.add_argument("file")
    sp = add("ns-search", cmd_ns_search, "degree-bounded NS refutation search")
    _add_system(sp)
    sp.add_argument("--dmax", type=int, required=True)
    sp.add_argument("--out")
    sp = add("ns-mindegree", cmd_ns_mindegree, "least refutation degree")
    _add_system(sp)
    sp.add_argument("--dcap", type=int, required=True)

    sp = add("tree", cmd_tree, "random or stored decision tree")
    sp.add_argument("file", nargs="?")
    sp.add_argument("--kind", choices=("inj", "part"), default="inj")
    sp.add_argument("--size", type=int, nargs=2, default=(4, 3), metavar=("M", "m"))
    sp.add_argument("--height", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--branch-sum", type=int, metavar="P")

    for name, fn, h in [("eval-check", cmd_eval_check, "check the six evaluation conditions"),
                        ("audit", cmd_audit, "falsified proof lines"),
                        ("compile-ucp", cmd_compile_ucp, "UCP pipeline"),
                        ("extract-oddtown", cmd_extract_oddtown, "oddtown witness polynomials"),
                        ("extract-fie", cmd_extract_fie, "FIE witness polynomials")]:
        sp = add(name, fn, h)
        sp.add_argument("case", help="corpus case name or JSON file")
        if name == "compile-ucp":
            sp.add_argument("--d", type=int)
            sp.add_argument("--out", help="bundle directory")
        if name.startswith("extract"):
            sp.add_argument("--field", type=int, default=2)

    sp = add("reduce", cmd_reduce, "apply a reduction to a witness")
    sp.add_argument("rule", choices=sorted(RULES))
    sp.add_argument("--witness", required=True)
    sp.add_argument("--out")
    sp = add("certify", cmd_certify, "exhaustive contract sweep")
    sp.add_argument("rule", choices=sorted(RULES) + ["all"])
    sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    sp.add_argument("--bound", type=int)

    sp = add("oracle", cmd_oracle, "independent brute-force answers")
    sp.add_argument("action", choices=("taut", "mindegree", "ledger"))
    sp.add_argument("--principle", choices=PRINCIPLES)
    for k in ("l", "d", "rows"):
        sp.add_argument(f"--{k}", type=int)
    sp.add_argument("--reading", choices=("intended", "literal"))
    sp.add_argument("--system", choices=SYSTEMS)
    sp.add_argument("--p", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--u-boolean", action="store_true")
    sp.add_argument("--field", type=int)
    sp.add_argument("--zmod", type=int)
    sp.add_argument("--dcap", type=int, default=4)
    sp.add_argument("--out")
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    t = time.perf_counter()
    try:
        res = args.fn(args)
    except (UsageError, ParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    stdout.write(res.render(args.format))
    print(f"[{args.command}] {time.perf_counter() - t:.3f}s exit {res.code}", file=sys.stderr)
    return res.code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
