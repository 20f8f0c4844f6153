import json
import subprocess
import sys

import pytest

from builders import (cyclic_files, edit_datum, negative_gamma, reversed_order, run, s3_files,
                      tampered_star)
from tabkit.cli import EXIT_AXIOM, EXIT_HORIZON, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, EXIT_VALIDATION


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    alg, datum = s3_files(tmp)
    return tmp, alg, datum


def report(path):
    return json.loads(path.read_text())


def test_cells(files):
    tmp, alg, _ = files
    out = tmp / "cells.json"
    assert run("cells", "--alg", alg, "--out", out) == EXIT_OK
    doc = report(out)
    assert doc["status"] == "pass"
    assert len(doc["cells"]["two_sided"]) == 3 and len(doc["cells"]["left"]) == 4
    assert sorted(doc["distinguished"]) == ["e", "s1", "s1*s2*s1", "s2"]
    assert sorted({r["a"] for r in doc["a_function"]}) == [0, 1, 3]


def test_verify_tabular_with_datum(files):
    tmp, alg, datum = files
    out = tmp / "tab.json"
    assert run("verify-tabular", "--alg", alg, "--datum", datum, "--out", out) == EXIT_OK
    doc = report(out)
    assert [r["status"] for r in doc["results"]] == ["pass"] * 5
    assert doc["cell_cross_check"] == []


def test_asymptotic(files):
    tmp, alg, datum = files
    out = tmp / "asym.json"
    assert run("asymptotic", "--alg", alg, "--datum", datum, "--samples", 100, "--out", out) == 0
    doc = report(out)
    assert doc["identity_check"]["failures"] == [] and doc["identity_check"]["tested"] == 100
    assert len(doc["corner_rings"]) == 4


def test_quotient(files):
    tmp, alg, datum = files
    q_alg, q_datum, out = tmp / "q.json", tmp / "qd.json", tmp / "qr.json"
    assert run("quotient", "--alg", alg, "--datum", datum, "--down-set", "c2",
               "--emit-alg", q_alg, "--emit-datum", q_datum, "--out", out) == EXIT_OK
    assert report(out)["surviving_count"] == 5
    assert run("cells", "--alg", q_alg, "--out", tmp / "qc.json") == EXIT_OK
    assert run("quotient", "--alg", alg, "--datum", datum, "--down-set", "c1") == EXIT_VALIDATION


@pytest.mark.parametrize("field,r", [("QQ", "1"), ("QQ", "2"), ("GF(5)", "2")])
def test_standard(files, field, r):
    tmp, alg, datum = files
    out = tmp / "std.json"
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c1", "--field", field,
               "--r", r, "--out", out) == EXIT_OK
    m = report(out)["modules"]
    assert len(m) == 1 and m[0]["dim"] == 2 and m[0]["equal"]
    assert m[0]["relation_failures"] == []


def test_standard_bad_inputs(files):
    tmp, alg, datum = files
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "zz") == EXIT_VALIDATION
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c1",
               "--field", "GF(5)", "--r", "5") == EXIT_VALIDATION
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c1",
               "--field", "GF(4)") == EXIT_VALIDATION


def test_negative_gamma_exits_2(files, capsys):
    tmp, alg, datum = files
    bad = edit_datum(datum, tmp / "neg.json", negative_gamma)
    assert run("verify-tabular", "--alg", alg, "--datum", bad) == EXIT_AXIOM
    err = capsys.readouterr().err
    assert "A1 fails" in err and "negative" in err


def test_tampered_star_exits_2(files, capsys):
    tmp, alg, datum = files
    bad = edit_datum(datum, tmp / "star.json", tampered_star)
    assert run("verify-tabular", "--alg", alg, "--datum", bad) == EXIT_AXIOM
    assert "A2 fails" in capsys.readouterr().err


def test_reversed_order_exits_2(files, capsys):
    tmp, alg, datum = files
    bad = edit_datum(datum, tmp / "rev.json", reversed_order)
    assert run("quotient", "--alg", alg, "--datum", bad, "--down-set", "c0") == EXIT_AXIOM
    assert "ideal closure" in capsys.readouterr().err


def test_non_split_exits_3(tmp_path, capsys):
    alg, datum = cyclic_files(tmp_path)
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c",
               "--field", "QQ") == EXIT_VALIDATION
    assert "does not split over QQ" in capsys.readouterr().err
    out = tmp_path / "f7.json"
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c",
               "--field", "GF(7)", "--out", out) == EXIT_OK
    assert len(report(out)["modules"]) == 3


def test_manual_rep(tmp_path):
    alg, datum = cyclic_files(tmp_path)
    rep = tmp_path / "rep.json"
    rep.write_text(json.dumps({"kind": "gamma-rep", "field": "QQ", "dim": 2, "matrices": {
        "g0": [[1, 0], [0, 1]], "g1": [[0, -1], [1, -1]], "g2": [[-1, 1], [-1, 0]]}}))
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c", "--field", "QQ",
               "--rep", rep) == EXIT_OK
    rep.write_text(json.dumps({"kind": "gamma-rep", "field": "QQ", "dim": 1, "matrices": {
        "g0": [[1]], "g1": [[2]], "g2": [[1]]}}))
    assert run("standard", "--alg", alg, "--datum", datum, "--lambda", "c", "--field", "QQ",
               "--rep", rep) == EXIT_VALIDATION


def test_usage_and_format_errors(tmp_path):
    assert run() == EXIT_USAGE
    assert run("frobnicate") == EXIT_USAGE
    assert run("cells") == EXIT_USAGE
    assert run("kl", "--family", "affA", "--n", 3, "--out", tmp_path / "x.json") == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert run("cells", "--alg", bad) == EXIT_VALIDATION
    assert run("cells", "--alg", tmp_path / "missing.json") == EXIT_VALIDATION


def test_partial_and_horizon(tmp_path, monkeypatch):
    alg = tmp_path / "aff.json"
    assert run("kl", "--family", "affA", "--n", 3, "--horizon", 4, "--descriptor-only",
               "--out", alg) == EXIT_OK
    assert run("cells", "--alg", alg) == EXIT_PARTIAL
    assert run("cells", "--alg", alg, "--allow-partial") == EXIT_OK
    monkeypatch.setenv("TABKIT_ENUM_CAP", "20")
    assert run("cells", "--alg", alg) == EXIT_HORIZON


def test_console_script_entry_point(files):
    _, alg, _ = files
    proc = subprocess.run([sys.executable, "-m", "tabkit.cli", "cells", "--alg", str(alg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "3 two-sided" in proc.stdout


def test_reports_are_byte_stable(files):
    tmp, alg, datum = files
    for k in (1, 2):
        assert run("cells", "--alg", alg, "--out", tmp / f"c{k}.json") == EXIT_OK
        assert run("asymptotic", "--alg", alg, "--samples", 50, "--out", tmp / f"a{k}.json") == 0
    assert (tmp / "c1.json").read_bytes() == (tmp / "c2.json").read_bytes()
    assert (tmp / "a1.json").read_bytes() == (tmp / "a2.json").read_bytes()
    again = tmp / "s3-again.json"
    assert run("kl", "--family", "A", "--n", 2, "--out", again) == EXIT_OK
    assert again.read_bytes() == alg.read_bytes()


def test_empty_algebra_skeleton(tmp_path):
    alg = tmp_path / "empty.json"
    alg.write_text('{"kind": "constants", "labels": []}')
    out = tmp_path / "cells.json"
    assert run("cells", "--alg", alg, "--out", out) == EXIT_OK
    doc = report(out)
    assert doc["cells"] == {"left": [], "right": [], "two_sided": []}
    assert doc["a_function"] == [] and doc["status"] == "pass"


def test_s3_a_function_rows(files):
    tmp, alg, _ = files
    out = tmp / "cells-a.json"
    run("cells", "--alg", alg, "--out", out)
    rows = report(out)["a_function"]
    assert [r["a"] for r in rows] == [0, 1, 1, 1, 1, 3]
