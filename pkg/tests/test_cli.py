import io
import json

import pytest

from nsworkbench.cli import run
from nsworkbench.principles import generate, instance_from_json
from nsworkbench.reductions import enumerate_witnesses


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def test_gen_json_roundtrip():
    code, out = call("gen", "count", "--p", "2", "--n", "3", "--format", "json")
    assert code == 0
    assert instance_from_json(json.loads(out)) == generate("count", p=2, n=3)


def test_mindegree_example():
    assert call("ns-mindegree", "--system", "neg-count", "--p", "2", "--n", "3",
                "--field", "2", "--dcap", "4") == (0, "0\n")
    assert call("ns-mindegree", "--system", "neg-injphp", "--m", "3", "--n", "2",
                "--field", "3", "--dcap", "4", "--jobs", "2") == (0, "2\n")


def test_byte_identical():
    for argv in (["matrix", "oddtown", "--n", "2", "--format", "csv"],
                 ["compile-ucp", "ucp_M3_l2_d2", "--format", "json"],
                 ["certify", "ucp_from_count", "--format", "csv"]):
        assert call(*argv) == call(*argv)


def test_usage_errors():
    assert call("gen", "count", "--p", "2")[0] == 2
    assert call("nosuch")[0] == 2
    assert call("ns-verify", "/nonexistent/file.ns")[0] == 2
    assert call("ns-system", "--system", "neg-count", "--p", "2", "--n", "4", "--field", "2")[0] == 2


def test_search_then_verify(tmp_path):
    path = tmp_path / "p.ns"
    code, _ = call("ns-search", "--system", "neg-injphp", "--m", "2", "--n", "1", "--field", "2",
                   "--dmax", "1", "--out", str(path))
    assert code == 0
    assert call("ns-verify", str(path)) == (0, "valid degree 1\n")
    lines = path.read_text().splitlines()
    broken = "\n".join(ln for ln in lines if not ln.startswith("h ")) + "\n"
    path.write_text(broken)
    assert call("ns-verify", str(path))[0] == 1
    assert call("ns-search", "--system", "neg-injphp", "--m", "2", "--n", "1", "--field", "2",
                "--dmax", "0")[0] == 1


def test_sat_and_oracle():
    assert call("sat", "oddtown", "--n", "2") == (0, "UNSAT\n")
    assert call("oracle", "taut", "--principle", "injphp", "--m", "2", "--n", "1") == (0, "true\n")


def test_eval_commands():
    assert call("eval-check", "fie_M4_n2")[0] == 0
    assert call("audit", "ucp_M3_l2_d2")[0] == 0
    code, out = call("extract-fie", "fie_M4_n2", "--field", "5", "--format", "json")
    assert code == 0 and json.loads(out)["ok"]
    assert call("extract-oddtown", "oddtown_M4_n2")[0] == 0


def test_compile_bundle_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path))
    assert call("compile-ucp", "ucp_M3_l2_d3", "--out", "bundle")[0] == 0
    man = json.loads((tmp_path / "bundle" / "manifest.json").read_text())
    assert any(f["path"] == "certificates/final.ns" for f in man["files"])


def test_reduce(tmp_path):
    w = next(enumerate_witnesses("injphp", m=3, n=3))
    f = tmp_path / "f.json"
    f.write_text(json.dumps(w.to_json()))
    code, out = call("reduce", "oddtown_from_injection", "--witness", str(f), "--format", "json")
    assert code == 0 and json.loads(out)["violations"] == []
    assert call("reduce", "ucp_from_count", "--witness", str(f))[0] == 1


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_formats(fmt):
    code, out = call("tree", "--size", "3", "2", "--height", "2", "--seed", "1", "--branch-sum", "2",
                     "--format", fmt)
    assert code == 0 and out
