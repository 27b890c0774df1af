from __future__ import annotations

import json
from pathlib import Path

import pytest

from microlap.cli import main, run_command

GOLDEN = Path(__file__).parent / "golden"
G = "z*(1-z)*Dz - z"


def test_transform_prints_the_operator(capsys):
    assert main(["transform", G]) == 0
    assert capsys.readouterr().out.strip() == "x*Dx^2 + (1-x)*Dx - 1"


@pytest.mark.parametrize(
    "name, argv",
    [
        ("transform", ["transform", G]),
        ("singularities", ["singularities", G]),
        ("einf_basis", ["einf-basis", G, "--trunc", "6"]),
        ("ezero_basis", ["ezero-basis", G, "--trunc", "4"]),
    ],
)
def test_json_matches_golden_files(capsys, name, argv):
    assert main(argv + ["--format", "json"]) == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / f"{name}.json").read_text()
    # a second run is bit-identical
    assert main(argv + ["--format", "json"]) == 0
    assert capsys.readouterr().out == out


def test_out_flag_writes_a_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert main(["mn", G, "--format", "json", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["exact"] == {"M": 0, "N": 1}


@pytest.mark.parametrize(
    "argv, code",
    [
        (["transform", "z*(1-z"], 1),
        (["transform", "Dz^1/2"], 1),
        (["kappa", G, "--theta", "0"], 1),
        (["micro", G, "--point", "2"], 1),
        (["frobenius", "(z^2-2)*Dz - 1", "--point", "0"], 0),
        (["singularities", "(z^2-2)*Dz - 1"], 1),
        (["nonsense"], 2),
        (["transform"], 2),
        (["verify", "--suite", "sometimes"], 2),
        (["borel-sum", G, "--theta", "0"], 2),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    err = capsys.readouterr().err
    if code == 1:
        assert err.startswith("error: ")


def test_numeric_report_shapes():
    doc, code = run_command(["borel-sum", G, "--theta", "0", "--x", "1", "--trunc", "24"])
    assert code == 0
    value = doc.to_dict()["numeric"]["value"]
    assert set(value) == {"re", "im"}
    assert value["re"] == pytest.approx(0.5963473623231940, abs=1e-12)
    doc, _ = run_command(["atheta", G, "--theta", "1/2pi"])
    entries = doc.to_dict()["numeric"]["entries"]
    assert entries[1][0]["re"] == pytest.approx(-0.5772156649015329, abs=1e-8)
    assert doc.inputs["theta"] == "1/2pi"


def test_apply_t_and_watson_reports():
    doc, code = run_command(["apply-t", G, "--at", "0", "--trunc", "4"])
    assert code == 0
    terms = doc.numeric["images"][0]["terms"]
    const = next(t for t in terms if t["exponent"] == "0" and t["log"] == 0)
    assert const["coefficient"]["re"] == pytest.approx(0.5772156649015329, abs=1e-15)
    doc, code = run_command(["watson", G, "--point", "1", "--theta", "1/2pi"])
    assert code == 0 and doc.checks == {"microsolution 0": True}


def test_demo_report():
    doc, code = run_command(["demo", "gompertz"])
    assert code == 0
    assert doc.exact["N"] == 1
    assert doc.exact["singularities"] == [["0", 1], ["1", 1]]
    assert all(doc.checks.values())


@pytest.mark.parametrize(
    "argv",
    [
        ["indicial", G],
        ["mn", G],
        ["index", G],
        ["frobenius", G, "--point", "0", "--trunc", "4"],
        ["micro", G, "--point", "1", "--trunc", "4"],
        ["sinf", G, "--trunc", "4"],
        ["lrho", G, "--point", "0", "--trunc", "4"],
        ["linf", G, "--trunc", "4"],
        ["apply-t", G, "--at", "inf", "--trunc", "4"],
        ["borel-sum", G, "--theta", "0", "--x", "1"],
        ["kappa", G, "--theta", "1/2pi"],
        ["watson", G, "--point", "0", "--theta", "1/2pi"],
    ],
)
def test_every_command_writes_valid_json(capsys, argv):
    assert main(argv + ["--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"command", "inputs", "exact", "numeric", "checks", "passed"}
    assert doc["passed"] is True
