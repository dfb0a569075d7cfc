import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from holescan.cli import main
from holescan.fir_design import load_taps
from holescan.pascal_fd import PascalConfig, fd_filter

ROOT = Path(__file__).parents[1]
EASY_SPEC = {"passband_edge": 0.2, "stopband_edge": 0.3, "passband_ripple_db": 0.5,
             "stopband_atten_db": 40}


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def read_col(path):
    return np.array([float(r[0]) for r in csv.reader(open(path))])


def test_design_direct(tmp_path, capsys):
    out = tmp_path / "lp.txt"
    assert main(["design", "--spec", write_json(tmp_path / "s.json", EASY_SPEC), "--direct",
                 "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["meets_spec"] and summary["path"] == "direct"
    assert load_taps(out).taps.size == summary["ntaps"]


def test_design_order_cap_exit_1(tmp_path, capsys):
    spec = dict(EASY_SPEC, stopband_edge=0.201, stopband_atten_db=60)
    code = main(["design", "--spec", write_json(tmp_path / "s.json", spec), "--direct",
                 "--order-cap", "100", "--out", str(tmp_path / "lp.txt")])
    assert code == 1
    assert "OrderCapExceeded" in capsys.readouterr().err


def test_design_missing_field(tmp_path, capsys):
    spec = {k: v for k, v in EASY_SPEC.items() if k != "stopband_edge"}
    assert main(["design", "--spec", write_json(tmp_path / "s.json", spec), "--direct",
                 "--out", str(tmp_path / "lp.txt")]) == 2
    assert "stopband_edge" in capsys.readouterr().err


def test_fd_matches_library(tmp_path):
    x = np.random.default_rng(0).standard_normal(50)
    inp, out = tmp_path / "x.csv", tmp_path / "y.csv"
    np.savetxt(inp, x)
    assert main(["fd", "--f", "0.3", "--n", "4", "--in", str(inp), "--out", str(out)]) == 0
    np.testing.assert_array_equal(read_col(out), fd_filter(read_col(inp), PascalConfig(4, 0.3)))


def test_resample_with_trace(tmp_path):
    inp, out, tr = tmp_path / "x.csv", tmp_path / "y.csv", tmp_path / "t.csv"
    np.savetxt(inp, [1.0, 3.0, 5.0])
    assert main(["resample", "--srcf", "0.5", "--n", "1", "--in", str(inp), "--out", str(out),
                 "--trace", str(tr)]) == 0
    np.testing.assert_array_equal(read_col(out), [1, 2, 3, 4, 5])
    assert next(csv.reader(open(tr))) == ["acc", "d", "f", "i"]


def test_bad_input_value(tmp_path, capsys):
    inp = tmp_path / "x.csv"
    inp.write_text("1.0\nabc\n")
    assert main(["fd", "--f", "0.3", "--in", str(inp), "--out", str(tmp_path / "y")]) == 2
    assert "abc" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["pe-curve", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["complexity", "--taps", str(tmp_path / "none.txt"), "--bands", "6"]) == 2


def test_pe_curve_rows(tmp_path):
    out = tmp_path / "pe.csv"
    assert main(["pe-curve", "--snr-db", "0,3,5,10", "--alpha", "0.1:0.9:0.1",
                 "--out", str(out)]) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["alpha", "snr_db", "lambda", "pe"] and len(rows) == 1 + 4 * 9


def test_pe_curve_bad_alpha(tmp_path):
    assert main(["pe-curve", "--snr-db", "0", "--alpha", "0:1:0.5",
                 "--out", str(tmp_path / "pe.csv")]) == 2


def test_complexity_from_file(tmp_path, capsys):
    taps = tmp_path / "p.txt"
    taps.write_text("# fir v1 ntaps=3\n0.25\n0.5\n0.25\n")
    assert main(["complexity", "--taps", str(taps), "--bands", "6"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["mu_prototype"] == 2 and rep["mu_total"] == 2 + 36 + 2


def test_bank(tmp_path):
    assert main(["bank", "--bands", "3", "--span-mhz", "5:15", "--out", str(tmp_path / "b")]) == 0
    manifest = json.loads((tmp_path / "b" / "bank.json").read_text())
    assert [round(b["center_mhz"], 6) for b in manifest["bands"]] == [6.666667, 10.0, 13.333333]


def test_sense_reproducible(tmp_path):
    outs = []
    for k in range(2):
        out, tr = tmp_path / f"r{k}.json", tmp_path / f"t{k}.csv"
        assert main(["sense", "--scenario", str(ROOT / "scenarios" / "case1.json"),
                     "--out", str(out), "--trace", str(tr), "--seed", "11"]) == 0
        outs.append((out.read_bytes(), tr.read_bytes()))
    assert outs[0] == outs[1]
    rep = json.loads(outs[0][0])
    assert [b["occupied"] for b in rep["bands"]] == [True, False, False]


def test_sense_bad_field(tmp_path, capsys):
    raw = json.loads((ROOT / "scenarios" / "case1.json").read_text())
    raw["n_coarse_bands"] = -1
    assert main(["sense", "--scenario", write_json(tmp_path / "s.json", raw),
                 "--out", str(tmp_path / "r.json")]) == 2
    assert "n_coarse_bands" in capsys.readouterr().err


def test_entry_point_version():
    res = subprocess.run([sys.executable, "-m", "holescan.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "holescan" in res.stdout
