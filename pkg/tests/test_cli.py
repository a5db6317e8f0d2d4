from __future__ import annotations

import json
from importlib import resources

import jsonschema
import pytest

from cihomol import CIRing
from cihomol.cli import parse_module_file, run
from cihomol.construct import h_family
from cihomol.errors import ParseError
from cihomol.module import quotient_by_form_power, residue_field

REPORT_SCHEMA = json.loads(resources.files("cihomol").joinpath("schemas/report.schema.json").read_text())
MODULE_SCHEMA = json.loads(resources.files("cihomol").joinpath("schemas/module.schema.json").read_text())


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(path, module):
    path.write_text(module.dumps())
    return str(path)


def test_verify_lemma_h_json(capsys):
    code, out, _ = call(capsys, "verify", "lemma-h", "--ring", "p=5;exps=2,4", "--g", "y")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert rep["aggregate"] == "pass" and len(rep["checks"]) == 6


def test_verify_failure_exit_code(capsys):
    code, out, _ = call(capsys, "verify", "length-identity", "--sample", "5", "--format", "text")
    assert code == 1 and "FAIL" in out


def test_betti_text(capsys, in_tmp):
    k = write(in_tmp / "k.json", residue_field(CIRing.parse("p=5;exps=2,2")))
    code, out, _ = call(capsys, "betti", "--ring", "p=5;exps=2,2", "--module", k, "--max-degree", "5")
    assert code == 0 and out.strip() == "1,2,3,4,5,6"
    code, out, _ = call(capsys, "betti", "--module", k, "--max-degree", "2", "--format", "json")
    assert json.loads(out)["betti"] == [1, 2, 3]


def test_tor_does_not_assert(capsys, in_tmp):
    r = CIRing.parse("p=5;exps=3,4")
    m = write(in_tmp / "M.json", quotient_by_form_power(r, r.variable(0), 1))
    code, out, _ = call(capsys, "tor", "--i", "1", "--module", m, "--module2", m, "--format", "json")
    assert code == 0 and json.loads(out)["dim"] > 0


def test_iso_and_disjoint_exit_codes(capsys, in_tmp):
    r = CIRing.parse("p=5;exps=3,4")
    mx = write(in_tmp / "mx.json", quotient_by_form_power(r, r.variable(0), 1))
    ny = write(in_tmp / "ny.json", quotient_by_form_power(r, r.variable(1), 1))
    assert call(capsys, "iso", "--module", mx, "--module2", mx)[0] == 0
    assert call(capsys, "iso", "--module", mx, "--module2", ny)[0] == 1
    assert call(capsys, "disjoint", "--module", mx, "--module2", ny)[0] == 0
    assert call(capsys, "disjoint", "--module", mx, "--module2", mx)[0] == 1


def test_support_undetermined_exit(capsys, in_tmp):
    r = CIRing.parse("p=5;exps=2,2")
    h = write(in_tmp / "h.json", quotient_by_form_power(r, r.parse_form("1,1"), 1))
    code, out, _ = call(capsys, "support", "--module", h, "--format", "json")
    assert code == 3 and json.loads(out)["point"] is None
    hy = write(in_tmp / "hy.json", quotient_by_form_power(r, r.variable(1), 1))
    code, out, _ = call(capsys, "support", "--module", hy)
    assert code == 0 and "(0:1)" in out
    code, out, _ = call(capsys, "support", "--module", hy, "--point", "x", "--format", "json")
    assert code == 0 and json.loads(out)["member"] is False


def test_parse_errors_exit_2(capsys, in_tmp):
    code, _, err = call(capsys, "ring-info", "--ring", "p=5;exps=2,x")
    assert code == 2 and "(at 11)" in err
    bad = in_tmp / "bad.json"
    bad.write_text('{"ring":"p=5;exps=2,2","dim":2,"actions":[[0,1,0,0],[0,0,1,0]]}')
    code, _, err = call(capsys, "betti", "--module", str(bad))
    assert code == 2 and "actions 0,1 do not commute" in err
    code, _, err = call(capsys, "betti")
    assert code == 2
    code, _, err = call(capsys, "betti", "--module", "missing.json")
    assert code == 2 and "cannot read" in err


def test_module_file_round_trip(capsys, in_tmp):
    r = CIRing.parse("p=5;exps=2,4")
    h2 = h_family(r, r.variable(1))[1]
    path = write(in_tmp / "h2.json", h2)
    m = parse_module_file(path)
    assert m.dumps() == (in_tmp / "h2.json").read_text()
    jsonschema.validate(json.loads(m.dumps()), MODULE_SCHEMA)
    assert parse_module_file(write(in_tmp / "k.json", residue_field(r))).dim == 1
    with pytest.raises(ParseError):
        (in_tmp / "junk.json").write_text("[")
        parse_module_file(str(in_tmp / "junk.json"))


def test_gen_and_subgroup(capsys, in_tmp):
    code, out, _ = call(capsys, "gen", "--ring", "p=5;exps=2,2", "--family", "avoiding", "--g", "y", "--budget", "10", "--out", "fam", "--format", "json")
    assert code == 0
    files = json.loads(out)["files"]
    assert len(files) == 10
    for f in files:
        jsonschema.validate(json.loads(open(f).read()), MODULE_SCHEMA)
    code, out, _ = call(capsys, "subgroup", "--ring", "p=5;exps=2,2", "--module", *files, "--format", "json")
    assert code == 0 and json.loads(out)["index"] == 2
    code, out, _ = call(capsys, "gclass", "--module", files[0], "--format", "json")
    assert json.loads(out)["modulus"] == 4


def test_module_outputs(capsys, in_tmp):
    r = CIRing.parse("p=5;exps=2,4")
    h1 = write(in_tmp / "h1.json", h_family(r, r.variable(1))[0])
    code, out, _ = call(capsys, "syzygy", "--module", h1, "--format", "json")
    assert code == 0 and json.loads(out)["dim"] == 6
    code, out, _ = call(capsys, "cosyzygy", "--module", h1, "--out", "c.json")
    assert code == 0 and parse_module_file("c.json").dim == 6
    code, out, _ = call(capsys, "tensor", "--module", h1, "--module2", h1, "--format", "json")
    assert json.loads(out)["dim"] == 2
    code, out, _ = call(capsys, "resolve", "--module", h1, "--max-degree", "3", "--format", "json")
    assert json.loads(out)["betti"] == [1, 1, 1, 1]
    code, out, _ = call(capsys, "ring-info", "--ring", "p=5;exps=2,4", "--format", "json")
    assert json.loads(out)["length"] == 8


def test_output_independent_of_cache(capsys, in_tmp):
    argv = ["verify", "thm-main-gap", "--ring", "p=5;exps=2,4", "--budget", "12"]
    first = call(capsys, *argv)[1]
    second = call(capsys, *argv)[1]  # served from the disk cache
    third = call(capsys, *argv, "--no-cache")[1]
    assert first == second == third
    assert any((in_tmp / ".cihomol-cache").iterdir())
    code, out, _ = call(capsys, "cache", "gc", "--format", "json")
    assert code == 0 and json.loads(out)["removed"] == 0
