import io
import json
import subprocess
import sys

import pytest

from pcontact.catalog import CATALOG
from pcontact.cli import emit_structure, parse_structure, run

KEYS = ["tool_version", "scope", "command", "inputs", "results", "residuals", "certificates"]


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


@pytest.fixture
def iw_file(tmp_path):
    code, text = call("catalog", "--emit", "iwasawa")
    assert code == 0
    p = tmp_path / "iwasawa.json"
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_check(iw_file):
    code, rep = call_json("check", iw_file)
    assert code == 0
    assert list(rep) == KEYS
    assert rep["scope"] == "invariant-level"
    assert rep["results"]["jacobi_ok"] is True


def test_contact_exists_witness(tmp_path):
    code, text = call("catalog", "--emit", "uga07_b", "--param", "eps=0", "--param", "rho=1")
    p = tmp_path / "uga07b_e0r1.json"
    p.write_text(text, encoding="utf-8")
    code, rep = call_json("contact", "--exists", "-p", "1", str(p))
    assert code == 0
    assert rep["results"]["exists"] is True and rep["results"]["witness"] == "φ₃"


def test_negative_answer_exits_zero():
    code, rep = call_json("contact", "--exists", "-p", "1", "@uga07_a")
    assert code == 0 and rep["results"]["exists"] is False


def test_contact_form_and_no_contact():
    code, rep = call_json("contact", "--form", "phi2+phi3", "@nakamura")
    assert code == 0 and rep["results"]["holds"] and rep["results"]["top_coefficient"] == "2"
    code, rep = call_json("contact", "--no-contact", "phi2", "@nakamura")
    assert code == 0 and rep["results"]["zeta"] == "-φ₁"


def test_sheaves():
    code, rep = call_json("sheaves", "--gamma", "phi3", "@iwasawa")
    assert code == 0
    assert rep["results"]["foliation"]["closed_under_bracket"] is False


def test_cohomology_variants():
    code, rep = call_json("cohomology", "--dolbeault", "@iwasawa")
    assert code == 0 and rep["results"]["dims"]["h[0][1]"] == 2
    code, rep = call_json("cohomology", "--derham", "@iwasawa")
    assert [rep["results"]["dims"][f"b[{k}]"] for k in range(7)] == [1, 4, 8, 10, 8, 4, 1]
    code, rep = call_json("cohomology", "--page1", "@h15")
    assert code == 0 and rep["results"]["certificate"] == "φ₁∧φ̄₁"
    code, rep = call_json("cohomology", "--frolicher", "6", "@iwasawa")
    assert code == 0
    code, rep = call_json("cohomology", "--z2", "0", "1", "@h15")
    assert code == 0


def test_deform_order2(iw_file):
    code, rep = call_json("deform", "--gamma", "phi3", "--order2", "--class", "0", iw_file)
    assert code == 0
    res = rep["residuals"]
    assert res and all(v == "0" for v in res.values())


def test_deform_space():
    code, rep = call_json("deform", "--gamma", "phi3", "--space", "@iwasawa")
    assert code == 0 and rep["results"]["dim"] == 4


def test_deform_theta_file(tmp_path):
    p = tmp_path / "theta.txt"
    p.write_text("phi1b*xi1 + phi2b*xi2\n", encoding="utf-8")
    code, rep = call_json("deform", "--gamma", "phi3", "--order2", "--theta", str(p), "@iwasawa")
    assert code == 0 and all(v == "0" for v in rep["residuals"].values())


def test_verify_small():
    code, rep = call_json("verify", "--suite", "lie-calculus", "--seed", "1", "--trials", "2",
                          "--bridge")
    assert code == 0
    assert rep["results"]["failures"] == 0 and rep["results"]["passed"] is True
    assert all(b["failures"] == [] for b in rep["results"]["bridge"].values())


def test_catalog_list():
    code, rep = call_json("catalog", "--list")
    assert code == 0
    ids = [e["id"] for e in rep["results"]]
    assert ids == list(CATALOG)


def test_sweep_ordered_and_parallel_identical():
    a = call("catalog", "--sweep", "uga07_b")
    b = call("catalog", "--sweep", "uga07_b", "--jobs", "2")
    assert a == b and a[0] == 0


def test_malformed_file_names_term(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"name": "z", "n": 3, "d": {"1": [
        {"coeff": {"re": "1", "im": "0"}, "factors": ["2", "4c"]}]}}), encoding="utf-8")
    code, rep = call_json("check", str(p))
    assert code == 1
    assert "4c" in rep["results"]["error"]["message"]


def test_bad_coefficient_names_term(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"name": "z", "n": 3, "d": {"3": [
        {"coeff": {"re": "1/0", "im": "0"}, "factors": ["1", "2"]}]}}), encoding="utf-8")
    code, rep = call_json("check", str(p))
    assert code == 1 and "1/0" in rep["results"]["error"]["message"]


def test_broken_tables_rejected(tmp_path):
    p = tmp_path / "b1.json"
    p.write_text(json.dumps({"name": "x", "n": 3, "d": {"1": [
        {"coeff": {"re": "1", "im": "0"}, "factors": ["2b", "3b"]}]}}), encoding="utf-8")
    code, rep = call_json("check", str(p))
    assert code == 1 and "(0,2)" in rep["results"]["error"]["message"]
    p = tmp_path / "b2.json"
    p.write_text(json.dumps({"name": "y", "n": 3, "d": {
        "1": [{"coeff": {"re": "-1", "im": "0"}, "factors": ["1", "3"]}],
        "3": [{"coeff": {"re": "-1", "im": "0"}, "factors": ["1", "2"]}]}}), encoding="utf-8")
    code, rep = call_json("check", str(p))
    assert code == 1 and "jacobi" in rep["results"]["error"]["message"]


def test_bad_form_expression():
    code, rep = call_json("contact", "--form", "phi1^^x", "@iwasawa")
    assert code == 1 and "phi1^^x" in rep["results"]["error"]["message"]


def test_unknown_catalog_entry():
    code, rep = call_json("check", "@nope")
    assert code == 1


def test_text_output():
    code, text = call("check", "--output", "text", "@iwasawa")
    assert code == 0 and text.startswith("tool_version: 0.1.0")


def test_determinism(iw_file):
    outs = {call("deform", "--gamma", "phi3", "--order2", "--class", "3", iw_file)[1] for _ in range(3)}
    assert len(outs) == 1


def test_round_trip_every_catalog_entry():
    for eid, e in CATALOG.items():
        for pt in e.grid():
            L = e.builder(pt)
            text = emit_structure(L)
            L2 = parse_structure(text)
            assert L2 == L, (eid, pt)
            assert emit_structure(L2) == text


def test_emit_parse_byte_identical(iw_file):
    text = open(iw_file, encoding="utf-8").read()
    assert emit_structure(parse_structure(text)) == text


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "pcontact", "check", "@iwasawa"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["results"]["jacobi_ok"] is True
