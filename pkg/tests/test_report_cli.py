import csv
import io
import json
import math
import struct
import subprocess
import sys

import pytest

from means_lab import ScanConfig, SignMap, hunt, margin, scan
from means_lab.cli import run
from means_lab.report import SIGNMAP_COLUMNS, emit_hunt, emit_signmap, fmt_float


def rows_of(data: bytes):
    return list(csv.DictReader(io.StringIO(data.decode("utf-8"))))


def test_empty_map_is_header_only():
    smap = SignMap(ScanConfig("EQ6_CONJ", (1, 10)), (), True)
    assert emit_signmap(smap) == (",".join(SIGNMAP_COLUMNS) + "\n").encode()


def test_three_cell_map_in_grid_order():
    smap = scan(ScanConfig("EQ6_CONJ", (1, 100), t_steps=3))
    rows = rows_of(emit_signmap(smap))
    assert [float(r["t"]) for r in rows] == pytest.approx([1.0, 10.0, 100.0], rel=1e-15)
    assert [r["sign"] for r in rows] == ["0", "+", "-"]
    assert [r["certified"] for r in rows] == ["true", "false", "false"]
    assert rows[0]["n"] == ""


@pytest.mark.parametrize("value", [0.1, -1.245351274003007e-05, 1 / 3, 5e-324, 1.7976931348623157e308, 0.0])
def test_fmt_float_round_trips(value):
    assert struct.pack("<d", float(fmt_float(value))) == struct.pack("<d", value)


def test_csv_margin_round_trips_bit_exact():
    smap = scan(ScanConfig("EQ1_POWER", (1, 1e3), t_steps=30, n_range=(0.5, 0.5)))
    for rec, row in zip(smap.cells, rows_of(emit_signmap(smap))):
        assert float(row["margin"]) == rec.margin
        if not rec.certified:
            assert rec.margin == margin("EQ1_POWER", rec.pair, 0.5)


def test_json_signmap_structure():
    smap = scan(ScanConfig("EQ6_CONJ", (1, 100), t_steps=3, seed=9))
    doc = json.loads(emit_signmap(smap, "json"))
    meta = doc["metadata"]
    assert meta["seed"] == 9 and meta["version"] and meta["config"]["t_steps"] == 3
    assert [r["sign"] for r in doc["records"]] == ["0", "+", "-"]
    assert set(doc["records"][0]) == set(SIGNMAP_COLUMNS)


def test_emit_hunt_without_witness_reports_minimum():
    res = hunt(ScanConfig("EQ6_CONJ", (1, 10)))
    row = rows_of(emit_hunt(res, "EQ6_CONJ"))[0]
    assert row["found"] == "false" and row["t"] == ""
    assert float(row["min_margin"]) == res.min_margin


def cli(capsysbinary, *argv):
    code = run(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


def test_eval_seiffert(capsysbinary):
    code, out, _ = cli(capsysbinary, "eval", "--kind", "P", "--x", "3", "--y", "1")
    assert code == 0 and float(out) == pytest.approx(6 / math.pi, rel=1e-15)


def test_eval_all_json(capsysbinary):
    code, out, _ = cli(capsysbinary, "eval", "--t", "4", "--out", "json")
    names = [r["name"] for r in json.loads(out)["records"]]
    assert code == 0 and names == list("HGAQPLI")


def test_eval_extended_precision(capsysbinary):
    code, out, _ = cli(capsysbinary, "eval", "--kind", "P", "--x", "3", "--y", "1", "--digits", "40")
    assert code == 0 and out.decode().startswith("1.909859317102744029226605160470172344")


def test_margin_verb_exits_zero_on_negative(capsysbinary):
    code, out, _ = cli(capsysbinary, "margin", "--ineq", "EQ6_CONJ", "--x", "100", "--y", "1")
    row = rows_of(out)[0]
    assert code == 0 and row["sign"] == "-"
    assert float(row["margin"]) == pytest.approx(-0.5085143566902225, rel=1e-13)


def test_margin_certify(capsysbinary):
    code, out, _ = cli(capsysbinary, "margin", "--ineq", "EQ1_POWER", "--n", "0.5", "--x", "1.1", "--y", "0.9", "--certify")
    row = rows_of(out)[0]
    assert code == 0 and row["certified"] == "true" and row["digits"] == "50" and row["sign"] == "-"


def test_chain_csv(capsysbinary):
    code, out, _ = cli(capsysbinary, "chain", "--x", "1", "--y", "4", "--out", "csv")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 11
    assert all(float(r["value"]) > 0 for r in rows if r["name"].startswith("margin_"))


def test_identities_and_lemma(capsysbinary):
    code, out, _ = cli(capsysbinary, "identities", "--x", "1", "--y", "4")
    assert code == 0 and len(rows_of(out)) == 4
    code, out, _ = cli(capsysbinary, "lemma", "--a", "2", "--b", "2", "--c", "1", "--d", "3", "--n", "2")
    assert code == 0 and float(rows_of(out)[0]["value"]) == 2.0
    code, _, err = cli(capsysbinary, "lemma", "--a", "3", "--b", "3", "--c", "1", "--d", "3", "--n", "2")
    assert code == 2 and "a+b <= c+d" in err


def test_scan_prints_seed(capsysbinary):
    code, out, err = cli(capsysbinary, "scan", "--ineq", "EQ2_PRODUCT", "--t-steps", "5", "--seed", "42")
    assert code == 0 and "seed: 42" in err and len(rows_of(out)) == 5


def test_hunt_exit_codes(capsysbinary):
    code, out, err = cli(capsysbinary, "hunt", "--ineq", "EQ6_CONJ", "--t-lo", "1", "--t-hi", "1000")
    row = rows_of(out)[0]
    assert code == 3 and row["found"] == "true" and 10 < float(row["t"]) < 100 and "seed: 0" in err
    code, out, _ = cli(capsysbinary, "hunt", "--ineq", "EQ6_CONJ", "--t-lo", "1", "--t-hi", "10")
    row = rows_of(out)[0]
    assert code == 0 and row["found"] == "false" and float(row["min_margin"]) >= 0


def test_bracket_and_profile(capsysbinary):
    code, out, _ = cli(capsysbinary, "bracket", "--ineq", "EQ6_CONJ", "--t-lo", "10", "--t-hi", "100")
    row = rows_of(out)[0]
    assert code == 0 and (row["sign_minus"], row["sign_plus"]) == ("+", "-")
    code, _, _ = cli(capsysbinary, "bracket", "--ineq", "EQ6_CONJ", "--t-lo", "2", "--t-hi", "10")
    assert code == 2
    code, out, _ = cli(capsysbinary, "profile", "--n-grid=-1,0.5,2")
    assert code == 0
    assert [r["classification"] for r in rows_of(out)] == ["holds-on-grid", "fails", "holds-on-grid"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["eval", "--x", "1"],
        ["eval", "--x", "-1", "--y", "2"],
        ["eval", "--x", "nan", "--y", "2"],
        ["eval", "--x", "1", "--y", "2", "--kind", "Z"],
        ["eval", "--x", "1", "--y", "2", "--t", "3"],
        ["margin", "--x", "1", "--y", "2"],
        ["margin", "--ineq", "EQ1_POWER", "--x", "1", "--y", "2"],
        ["margin", "--ineq", "EQ2_PRODUCT", "--x", "1", "--y", "2", "--out", "xml"],
        ["scan", "--ineq", "EQ2_PRODUCT", "--t-lo", "5", "--t-hi", "2"],
        ["hunt", "--ineq", "EQ6_CONJ", "--seed", "x"],
        ["eval", "--x", "1", "--y", "2", "--digits", "10"],
        ["margin", "--ineq", "EQ1_POWER", "--n", "700", "--x", "1e300", "--y", "1"],
    ],
)
def test_usage_and_domain_errors_exit_two(capsysbinary, argv):
    code, out, err = cli(capsysbinary, *argv)
    assert code == 2 and out == b"" and err


def test_digits_environment_variable(capsysbinary, monkeypatch):
    monkeypatch.setenv("MEANS_LAB_DIGITS", "60")
    _, out, _ = cli(capsysbinary, "margin", "--ineq", "EQ2_PRODUCT", "--t", "1", "--certify")
    # 60, 120, 240, 480: an exact zero exhausts the schedule.
    assert rows_of(out)[0]["digits"] == "480"
    _, out, _ = cli(capsysbinary, "margin", "--ineq", "EQ2_PRODUCT", "--t", "4", "--certify")
    assert rows_of(out)[0]["digits"] == "60"


def run_module(*argv):
    return subprocess.run(
        [sys.executable, "-m", "means_lab", *argv], capture_output=True, check=False
    )


@pytest.mark.parametrize(
    "argv",
    [
        ("scan", "--ineq", "EQ1_POWER", "--n-lo", "0", "--n-hi", "1", "--n-steps", "3", "--t-steps", "20", "--seed", "5", "--out", "json"),
        ("hunt", "--ineq", "EQ6_CONJ", "--t-hi", "1000", "--seed", "5"),
    ],
)
def test_repeat_runs_are_byte_identical(argv):
    first, second = run_module(*argv), run_module(*argv)
    assert first.returncode == second.returncode
    assert first.stdout == second.stdout and first.stdout
    assert b"\r" not in first.stdout
