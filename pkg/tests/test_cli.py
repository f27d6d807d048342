import csv
import io
import json

import pytest

from miop.cli import main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_degrees(capsys):
    code, out, _ = run(capsys, "build", "--family", "W", "--params", "2,2,2,2", "--deletions", "1I", "--nmax", "3")
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == "miop/1"
    assert d["Xi"]["degree"] == 1
    assert [p["degree"] for p in d["P"]] == [1, 2, 3, 4]
    assert all(isinstance(c, str) for c in d["Xi"]["coefficients"])
    assert len(d["Xi"]["coefficients"][0].replace("-", "").replace(".", "")) > 70


def test_build_empty_deletions_gives_classical(capsys):
    code, out, _ = run(capsys, "build", "--family", "W", "--params", "1,1,1,1", "--nmax", "1")
    d = json.loads(out)
    assert code == 0 and d["ell"] == 0
    assert [float(c) for c in d["P"][1]["coefficients"]] == [4.0, -4.0]


def test_build_invalid_range(capsys):
    code, _, err = run(capsys, "build", "--family", "W", "--params", "0.8,2,2,2", "--deletions", "1I")
    assert code == 2 and "deletion range" in err


def test_build_bad_input(capsys):
    assert run(capsys, "build", "--family", "AW", "--params", "0.1,0.1,0.1,0.1")[0] == 2
    assert run(capsys, "build", "--family", "W", "--params", "1,2,3")[0] == 2
    assert run(capsys, "build", "--family", "W", "--params", "2,2,2,2", "--deletions", "1X")[0] == 2


def test_build_csv(capsys):
    code, out, _ = run(capsys, "build", "--family", "W", "--params", "2,2,2,2", "--deletions", "1I", "--nmax", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "schema" and len(rows) == 1 + 2 + 2 + 3


def test_round_trip_build_then_verify(tmp_path, capsys):
    b = tmp_path / "b.json"
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    args = ["--family", "W", "--params", "2,2,2,2", "--deletions", "1I,2I", "--nmax", "2"]
    assert main(["build", *args, "--out", str(b)]) == 0
    c1 = main(["verify", "--config", str(b), "--suite", "identities", "--out", str(r1)])
    c2 = main(["verify", *args, "--suite", "identities", "--out", str(r2)])
    assert c1 == c2 == 0
    a, z = json.loads(r1.read_text()), json.loads(r2.read_text())
    assert [c["pass"] for c in a["checks"]] == [c["pass"] for c in z["checks"]]
    assert a["schema"] == "miop/1" and a["pass"] is True


def test_verify_hermiticity_invalid(capsys):
    code, out, _ = run(capsys, "verify", "--family", "W", "--params", "0.8,2,2,2", "--deletions", "1I", "--suite", "hermiticity")
    assert code == 1
    assert json.loads(out)["metadata"]["details"]["hermiticity"]["verdict"] == "not established"


def test_verify_invalid_is_exit_2(capsys):
    code, _, _ = run(capsys, "verify", "--family", "W", "--params", "0.8,2,2,2", "--deletions", "1I", "--suite", "identities")
    assert code == 2


def test_scan_rows(capsys):
    code, out, _ = run(capsys, "scan", "--family", "W", "--params", "2,2,2,2", "--deletions", "1I", "--grid", "a1=0.5:3:6")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    assert code == 0 and len(rows) == 6
    assert [r["status"] for r in rows[:2]] == ["invalid", "invalid"]
    assert all(r["status"] == "ok" and r["zeros_D_gamma"] == "0" for r in rows[2:])


def test_scan_single_point_and_degenerate(capsys):
    code, out, _ = run(capsys, "scan", "--family", "W", "--params", "2,2,2,2", "--deletions", "1I,1II")
    rows = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert code == 0 and len(rows) == 2 and "degenerate" in rows[1]


def test_grid_parser():
    assert parse_grid(["a2=1,2,3"]) == [(1, ["1", "2", "3"])]
    assert parse_grid(["a1=1:2:1"]) == [(0, ["1"])]
    with pytest.raises(ValueError):
        parse_grid(["b1=1:2:3"])


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"family": "AW", "params": ["0.05", "0.05", "0.05", "0.05"], "q": "0.1", "deletions": "1I", "nmax": 1}))
    code, out, _ = run(capsys, "build", "--config", str(cfg))
    assert code == 0 and json.loads(out)["Xi"]["degree"] == 1
