import csv
import json
import subprocess
import sys

import pytest

from carnot_hardy import cli
from carnot_hardy.identities import IdentityResult


@pytest.fixture
def h1(tmp_path):
    p = tmp_path / "h1.json"
    p.write_text('{"kind": "heisenberg", "n": 1}')
    return p


def _rows(out):
    with open(out / "report.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def test_identities_suite(tmp_path, h1):
    out = tmp_path / "out"
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"group": str(h1), "suite": "identities", "seed": 7, "out": str(out)}))
    assert cli.main(["--manifest", str(m)]) == 0
    rows = _rows(out)
    assert list(rows[0]) == list(cli.CSV_HEADER)
    checks = {r["check"] for r in rows}
    assert {"power-laplacian", "norm-gradient", "infinity-harmonicity",
            "weighted-laplacian"} <= checks
    assert all(r["verdict"] == "holds" for r in rows)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["counts"]["violated"] == 0 and summary["exit_status"] == 0
    report = json.loads((out / "report.json").read_text())
    assert report["manifest"]["group"] == {"kind": "heisenberg", "n": 1}
    assert not [p for p in out.iterdir() if p.name.startswith(".")]


def test_inline_group_and_relative_paths(tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"group": {"kind": "abelian", "n": 3}, "suite": "identities",
                             "out": "rel"}))
    assert cli.main(["--manifest", str(m)]) == 0
    assert (tmp_path / "rel" / "report.csv").is_file()


@pytest.mark.parametrize("argv", [
    ["--alpha", ""],
    ["--eps", "0.1,0.2"],
    ["--suite", "nope"],
    ["--seed", "-1"],
    ["--samples", "5"],
])
def test_invalid_manifest_exit_2(tmp_path, h1, argv, capsys):
    code = cli.main(["--group", str(h1), "--suite", "hardy", "--out", str(tmp_path / "o")] + argv)
    assert code == 2
    assert "error:" in capsys.readouterr().err
    assert not (tmp_path / "o" / "report.csv").exists()


def test_missing_files_exit_2(tmp_path):
    assert cli.main(["--manifest", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["--group", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "htype", "m": 2, "k": 1, "J": [[[1, 0], [0, 1]]]}')
    assert cli.main(["--group", str(bad), "--out", str(tmp_path)]) == 2
    m = tmp_path / "m.json"
    m.write_text('{"group": {"kind": "heisenberg", "n": 1}, "grids": {"alpha": []}, "out": "x"}')
    assert cli.main(["--manifest", str(m)]) == 2
    m.write_text('{"group": {"kind": "heisenberg", "n": 1}, "unknown": 1}')
    assert cli.main(["--manifest", str(m)]) == 2


def test_violation_exit_1(tmp_path, h1, monkeypatch):
    bad = IdentityResult("fake", "H1", {}, max_error=1.0, tolerance=1e-8, points=1)
    monkeypatch.setattr(cli, "identity_suite", lambda g, seed: [bad])
    assert cli.main(["--group", str(h1), "--suite", "identities", "--out", str(tmp_path)]) == 1
    assert _rows(tmp_path)[0]["verdict"] == "violated"


def test_hardy_suite_rows_and_determinism(tmp_path, h1):
    argv = ["--group", str(h1), "--suite", "hardy", "--samples", "2000", "--battery", "3",
            "--alpha", "0,1", "--gamma", "0,2", "--seed", "11"]
    assert cli.main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(argv + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "report.csv").read_bytes()
    assert a == (tmp_path / "b" / "report.csv").read_bytes()
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    rows = _rows(tmp_path / "a")
    assert len(rows) == 12
    assert {(r["alpha"], r["param"]) for r in rows} == {("0", "0"), ("0", "2"), ("1", "0"), ("1", "2")}
    # 17 significant digits
    assert any(len(r["value"].replace("-", "").replace(".", "").split("e")[0]) >= 16 for r in rows)


def test_skipped_combinations_are_recorded(tmp_path, h1):
    assert cli.main(["--group", str(h1), "--suite", "rellich", "--samples", "1000", "--battery", "1",
                     "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["checks"] == 0 and summary["skipped"][0]["suite"] == "rellich"


def test_module_entry_point(tmp_path, h1):
    proc = subprocess.run([sys.executable, "-m", "carnot_hardy", "--group", str(h1), "--suite",
                           "identities", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "report.csv").is_file()
