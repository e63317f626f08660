import json
import subprocess
import sys

import pytest

from lptorus.cli import main
from lptorus.field import read_pfld


def test_synth_writes_field_and_norm(tmp_path, capsys):
    out = tmp_path / "f.pfld"
    assert main(["synth", "--alpha", "0.6", "--seed", "42", "--out", str(out)]) == 0
    assert capsys.readouterr().out.startswith("besov_norm ")
    f = read_pfld(out)
    assert f.N == 2**14 and "seed=42" in f.description


def test_synth_integer_regularity(tmp_path, capsys):
    assert main(["synth", "--alpha", "2.0", "--out", str(tmp_path / "f")]) == 2
    assert "regularity must be non-integer" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nosuch"],
        ["synth", "--alpha", "0.6"],
        ["check", "--identity", "nosuch"],
        ["check", "--decay", "nosuch"],
        ["check"],
        ["remainder", "--formula", "omega9"],
        ["remainder", "--formula", "omega2", "--alpha", "0.6"],
        ["synth", "--alpha", "zero", "--out", "x"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"formula": "omega1", "colour": "red"}))
    assert main(["remainder", "--config", str(cfg)]) == 1


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 0.6, "seed": 1}))
    for seed in ("1", "2"):
        main(["synth", "--config", str(cfg), "--seed", seed, "--out", str(tmp_path / f"{seed}.pfld")])
    assert "seed=2" in read_pfld(tmp_path / "2.pfld").description
    assert "alpha=0.6" in read_pfld(tmp_path / "1.pfld").description


def test_check_identity_passes(tmp_path):
    out = tmp_path / "r.json"
    assert main(["check", "--identity", "wdofd", "--n", "3", "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["pass"] and doc["fitted"]["residual"] <= 1e-8


def test_check_decay_report(tmp_path):
    out = tmp_path / "r.json"
    code = main(["check", "--decay", "c_kj", "--word", "12", "--seeds", "3", "--json", str(out)])
    doc = json.loads(out.read_text())
    assert code == 0 and doc["expected"] == -1.3
    assert doc["suite"] == "decay/c_kj"


def test_remainder_tolerance_failure(tmp_path):
    code = main(["remainder", "--formula", "omega1", "--alpha", "1.4", "--seeds", "1",
                 "--tolerance", "1e-9", "--json", str(tmp_path / "r.json")])
    assert code == 3


def test_remainder_and_fit_roundtrip(tmp_path):
    csv_path, rep = tmp_path / "s.csv", tmp_path / "r.json"
    assert main(["remainder", "--formula", "omega1", "--alpha", "1.4", "--seeds", "2",
                 "--csv", str(csv_path), "--json", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert doc["expected"] == 1.4 and abs(doc["fitted"]["median_slope"] - 1.4) <= 0.1
    fit_out = tmp_path / "fit.json"
    assert main(["fit", "--csv", str(csv_path), "--json", str(fit_out)]) == 0
    assert json.loads(fit_out.read_text())["fitted"]["r_min"] == 3


def test_blocks_and_paraproduct(tmp_path, capsys):
    f, g = tmp_path / "f.pfld", tmp_path / "g.pfld"
    main(["synth", "--alpha", "0.6", "--seed", "1", "--grid", "1024", "--out", str(f)])
    main(["synth", "--alpha", "0.7", "--seed", "2", "--grid", "1024", "--out", str(g)])
    capsys.readouterr()
    assert main(["blocks", "--in", str(f)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "j,sup_norm" and len(lines) == 1 + 9
    assert main(["paraproduct", "--f", str(f), "--g", str(g), "--out", str(tmp_path / "p.pfld")]) == 0
    residual = float(capsys.readouterr().out.split()[1])
    assert residual <= 1e-10


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lptorus", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "lptorus" in res.stdout
