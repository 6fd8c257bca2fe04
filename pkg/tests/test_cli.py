import json

import pytest
from click.testing import CliRunner

from corpus import CORPUS, FIXTURES
from pinsep import __version__
from pinsep.cli import main


def run(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env=env)


def result(*args):
    out = run(*args, "--format", "json")
    assert out.exit_code == 0, out.output
    return json.loads(out.output)


def test_report_envelope_and_round_trip():
    path = CORPUS / "truncated_f3.pinsep"
    rep = result("classify", path)
    assert rep["tool"] == "pinsep" and rep["version"] == __version__ and rep["command"] == "classify"
    assert rep["input"]["file"] == "truncated_f3.pinsep" and len(rep["input"]["sha256"]) == 64
    assert json.loads(json.dumps(rep)) == rep
    assert rep["result"]["purely_inseparable"]["value"] is True
    assert "timing" not in rep["result"]


@pytest.mark.parametrize("cmd", [["classify"], ["tower"], ["jb"], ["diff", "--order", "2"]])
def test_output_is_byte_identical(cmd):
    path = CORPUS / "exponent_two.pinsep"
    a = run(*cmd, path, "--format", "json")
    b = run(*cmd, path, "--format", "json")
    assert a.exit_code == 0 and a.output == b.output


def test_timing_only_on_request():
    out = result("classify", CORPUS / "truncated_f2.pinsep", "--timing")
    assert "timing" in out["result"]


def test_false_verdict_is_success_with_witness():
    rep = result("classify", CORPUS / "ex_6_2.pinsep", "--leg", "A:B")
    res = rep["result"]
    assert res["chain_dims"] == [81, 4, 1]
    assert res["purely_inseparable"]["value"] is False
    assert res["witness"].startswith("dim A[B³] = 4")


def test_text_format():
    out = run("classify", CORPUS / "truncated_f2.pinsep", "--format", "text")
    assert out.exit_code == 0
    assert "command: classify" in out.output and "purely_inseparable:" in out.output


@pytest.mark.parametrize("name, k, dims", [("truncated_f3", 2, [3, 6, 9]), ("truncated_f2", 1, [2, 4]),
                                            ("truncated_f2", 0, [2])])
def test_diff_dimensions(name, k, dims):
    res = result("diff", CORPUS / f"{name}.pinsep", "--order", k)["result"]
    assert res["dims_bracket"] == res["dims_dual"] == dims
    assert res["routes_agree"] is True


def test_diff_operations():
    res = result("diff", CORPUS / "truncated_f2.pinsep", "--order", 1, "--op", "delta")["result"]
    assert [d["matrix"] for d in res["delta"]] == [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    res = result("diff", CORPUS / "truncated_x9.pinsep", "--order", 1, "--op", "ext")["result"]
    assert all(e["restriction_matches"] and e["extended_order"] <= e["bound"] for e in res["ext"])
    res = result("diff", CORPUS / "truncated_x9.pinsep", "--order", 3, "--op", "res")["result"]
    assert all(r["within_bound"] for r in res["res"])


def test_tower_summary():
    res = result("tower", CORPUS / "composition_counterexample.pinsep")["result"]
    assert res["summary"][0] == "A⊂C: not purely inseparable; F-extension fails at e=1 (dim 5 ∤ 243)"
    res = result("tower", CORPUS / "truncated_f2.pinsep")["result"]
    assert res["single_leg"] is True


def test_jb_flags_shared_constants():
    res = result("jb", CORPUS / "kxk.pinsep")["result"]
    assert res["hypothesis"] == "not finite exponent"
    assert res["collisions"][0]["rings"][:2] == ["H1", "H2"]
    res = result("jb", CORPUS / "truncated_x9.pinsep")["result"]
    assert res["special_bases"]["End over B"] == {"size": 3, "elements": ["1", "x", "x^2"]}
    assert res["violations"] == []


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.pinsep"
    bad.write_text("[algebra]\np = 4\ngenerators = x\nx^2 = 0\n")
    out = run("classify", bad)
    assert out.exit_code == 2
    assert "line 2" in out.output


def test_resource_cap_exit_code():
    path = CORPUS / "ex_6_2.pinsep"
    assert run("classify", path, "--max-dim", 100).exit_code == 3
    assert run("classify", path, env={"PINSEP_MAX_DIM": "100"}).exit_code == 3


def test_missing_subring_exit_code():
    assert run("classify", CORPUS / "truncated_f2.pinsep", "--leg", "A:Z").exit_code == 3


def test_selftest_rejects_non_associative_table():
    out = run("selftest", FIXTURES / "bad_associativity.pinsep", "--format", "json")
    assert out.exit_code == 1
    rep = json.loads(out.output)
    assert rep["result"]["failures"] == 1
    assert "associativity failure" in json.dumps(rep["result"]["files"])


def test_selftest_filter_on_a_file():
    out = run("selftest", CORPUS / "exponent_one_counterexample.pinsep", "--filter", "jb", "--format", "json")
    assert out.exit_code == 0, out.output
    rep = json.loads(out.output)["result"]
    assert rep["groups"] == ["jb"] and rep["failures"] == 0
