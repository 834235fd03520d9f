from __future__ import annotations

import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from hkquadric import cli
from hkquadric.cli import main


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_density_default_grid():
    code, text = run("density", "--n", "3", "--p", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 601
    assert F(rows[0]["x"]) == 0 and F(rows[0]["f"]) == 0
    assert F(rows[-1]["x"]) == 3 and F(rows[-1]["f"]) == 0
    assert all(r["exact"] == "exact" for r in rows)


def test_density_json_schema():
    code, text = run("density", "--n", "3", "--p", "5", "--points", "0,5/2,3/2", "--format", "json")
    assert code == 0
    rows = [json.loads(line) for line in text.splitlines()]
    assert [set(r) for r in rows] == [{"x", "f", "exact"}] * 3
    for r in rows:
        num, den = r["f"].split("/")
        assert int(den) > 0 and isinstance(r["exact"], bool)
    assert rows[1]["f"] == "5/84"


def test_density_is_deterministic():
    a = run("density", "--n", "4", "--p", "7", "--samples", "97")[1]
    b = run("density", "--n", "4", "--p", "7", "--samples", "97")[1]
    assert a == b


def test_density_unresolved_exit_code():
    code, text = run("density", "--n", "3", "--p", "5", "--points", "24999/10000", "--depth", "2")
    assert code == 3
    assert "approx" in text


def test_ehk_outputs():
    code, text = run("ehk", "--n", "3", "--p", "5")
    assert code == 0 and "185/153" in text
    code, text = run("ehk", "--n", "3", "--p", "5", "--method", "series", "--format", "json")
    row = json.loads(text)
    assert row["limit"] == "29/24" and row["method"] == "series"
    assert abs(F(row["value"]) - F(185, 153)) <= F(row["tail_bound"])
    code, text = run("ehk", "--n", "3", "--primes", "5,7,11,13", "--table")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["decreasing"] for r in rows[1:]] == ["true"] * 3
    assert [F(r["value"]) for r in rows] == [F(185, 153), F(359, 297), F(881, 729), F(1229, 1017)]


def test_verify_commands():
    code, text = run("verify", "--sectan", "--order", "8")
    assert code == 0 and text.strip() == "1,1,1,2,5,16,61,272"
    code, text = run("verify", "--n", "3", "--p", "5", "--cover")
    assert code == 0 and "exact partition identity holds" in text
    code, text = run("verify", "--n", "3", "--p", "5", "--s", "1")
    assert code == 0 and text.strip().endswith("0 discrepancies")


def test_verify_failure_exit_code(monkeypatch):
    monkeypatch.setattr(cli, "compare_all", lambda ctx, s, cap=None: [(3, 10, 11)])
    code, text = run("verify", "--n", "3", "--p", "5")
    assert code == 1
    assert "degree 3: oracle 10, engine 11" in text


@pytest.mark.parametrize("argv", [
    ("ehk", "--n", "3", "--p", "4"),
    ("ehk", "--n", "2", "--p", "5"),
    ("density", "--n", "6", "--p", "3"),
])
def test_parameter_errors(argv):
    code, _ = run(*argv)
    assert code == 2


def test_sectan_and_fthreshold_and_cover():
    code, text = run("sectan", "--order", "5")
    assert code == 0 and len(text.splitlines()) == 6
    code, text = run("fthreshold", "--n", "3", "--p", "5")
    assert code == 0 and text.strip() == "3"
    code, text = run("cover", "--n", "3", "--p", "5", "--points", "12/25")
    assert code == 0 and "resolved" in text


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hkquadric", "ehk", "--n", "4", "--p", "5"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "437/385" in res.stdout
