"""CLI dispatch, CSV/SVG artifacts, determinism, exit codes."""

import math
import subprocess
import sys

import pytest

from homodyn.cli import main, parse_base
from homodyn.psl2 import identity
from homodyn.report import ExperimentReport, emit_csv, emit_svg


def run_cli(args):
    return main(list(args))


def test_parse_base_named():
    g = parse_base("golden")
    assert g.a / g.c == pytest.approx((1 + math.sqrt(5)) / 2)
    assert parse_base("identity").almost_equal(identity())
    g2 = parse_base("sqrt2")
    assert g2.a / g2.c == pytest.approx(math.sqrt(2))
    g3 = parse_base("liouville(3)")
    assert 0.0 < g3.a / g3.c < 1.0
    g4 = parse_base("1.5,0.5,1,1")
    assert g4.a == pytest.approx(1.5)


def test_parse_base_rejects():
    from homodyn.cli import ConfigError

    with pytest.raises(ConfigError):
        parse_base("nonsense")
    with pytest.raises(ConfigError):
        parse_base("1,2,3,4")  # det != 1 is repaired, so use a singular one
    # the second case: det = 1*4-2*3 = -2 < 0 -> GroupError -> ConfigError


def test_csv_format(tmp_path):
    rep = ExperimentReport(
        name="demo", params={}, columns=["a", "b"],
        rows=[(1, 0.5), (2, 1.0 / 3.0)],
    )
    path = tmp_path / "out.csv"
    emit_csv(rep, str(path), seed=42, version="0.1.0")
    text = path.read_bytes().decode("ascii")
    lines = text.split("\n")
    assert lines[0] == "# homodyn v0.1.0 seed=42"
    assert lines[1] == "a,b"
    assert lines[2] == "1,0.5"
    assert lines[3] == "2,0.333333333333"
    assert text.endswith("\n") and "\r" not in text


def test_csv_empty_report(tmp_path):
    rep = ExperimentReport(name="empty", columns=["x"])
    path = tmp_path / "empty.csv"
    emit_csv(rep, str(path), seed=1)
    assert len(path.read_text().splitlines()) == 2  # header + columns


def test_svg_single_marker_and_clipping(tmp_path):
    path = tmp_path / "orbit.svg"
    emit_svg([0.0, 0.0, 0.3], [1.0, 1.0, 9.9], str(path))
    text = path.read_text()
    assert text.count("<circle") == 2  # duplicates collapse
    assert 'cy="-4' in text  # clipped to the border
    assert 'viewBox="-0.6 -4.0 1.2 3.2' in text


def test_cli_constants_table(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["constants", "--s", "0.5", "--kappa", "1"]) == 0
    assert (tmp_path / "homodyn_constants.csv").exists()  # CSV always written
    out = capsys.readouterr().out
    assert "gamma0_spectral" in out
    assert "0.011111" in out


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["definitely-not-an-experiment"]) == 1
    assert run_cli(["orbit", "--base", "nonsense", "--N", "10"]) == 1
    # numeric failure: unwritable output path
    bad = tmp_path / "no-such-dir" / "x.csv"
    code = run_cli(["constants", "--out", str(bad)])
    assert code == 2


def test_cli_orbit_csv_deterministic_across_threads(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(["orbit", "--base", "golden", "--gamma", "0.01",
                    "--N", "20000", "--threads", "1", "--out", str(a)]) == 0
    assert run_cli(["orbit", "--base", "golden", "--gamma", "0.01",
                    "--N", "20000", "--threads", "8", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_config_file_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N=500\ngamma=0.0\n")
    out = tmp_path / "out.csv"
    code = run_cli(["orbit", "--config", str(cfg), "--base", "identity",
                    "--out", str(out)])
    assert code == 0
    header = out.read_text().splitlines()
    assert header[0].startswith("# homodyn v")


def test_cli_dim_and_mollify_smoke(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["dim", "--kappa", "1", "--levels", "2",
                    "--schedule", "20,800", "--R", "1000"]) == 0
    out = capsys.readouterr().out
    assert "tree_bound_final" in out
    assert run_cli(["mollify", "--delta", "0.05", "--n", "2",
                    "--gamma-box", "0.5"]) == 0


def test_cli_entrypoint_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "homodyn.cli", "constants", "--s", "0.5"],
        capture_output=True, text=True, timeout=120, cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert "gamma0" in proc.stdout


def test_cli_pieces_and_box_smoke(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["pieces", "--base", "golden", "--gamma", "0.1",
                    "--eps", "0.1", "--N", "3000"]) == 0
    out = capsys.readouterr().out
    assert "covered_fraction" in out
    assert run_cli(["box", "--base", "golden", "--T", "100", "200",
                    "--weighted"]) == 0
    out = capsys.readouterr().out
    assert "weighted_average" in out


def test_cli_dio_twist_prog_smoke(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["dio", "--x", "1.4142135623730951", "--depth", "12",
                    "--bound", "100", "--tmax", "20"]) == 0
    out = capsys.readouterr().out
    assert "witness_symmetric" in out
    assert run_cli(["twist", "--base", "golden", "--frequency", "0.25",
                    "--T", "50"]) == 0
    assert run_cli(["prog", "--base", "golden", "--T", "100"]) == 0


def test_cli_csv_standard_reader(tmp_path, monkeypatch):
    import csv

    monkeypatch.chdir(tmp_path)
    out = tmp_path / "orbit.csv"
    assert run_cli(["orbit", "--base", "golden", "--gamma", "0.0",
                    "--N", "2000", "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0].startswith("# homodyn v")
    header = rows[1]
    assert header == ["function", "N_prefix", "empirical_mean", "haar_mean",
                      "discrepancy"]
    for row in rows[2:]:
        assert len(row) == len(header)
        float(row[2]); float(row[3]); float(row[4])
