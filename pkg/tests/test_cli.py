import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import trapezoid

from hulthen_dirac.cli import ConfigError, fmt, main, parse_config_text


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


SPIN_FLAGS = ["--mode", "spin", "--M", "10", "--r0", "10", "--V0", "10", "--C", "10.1",
              "--H", "0", "--d0", "0"]


# --- level ------------------------------------------------------------------

def test_level_example(capsys):
    code, out, _ = run(capsys, "level", *SPIN_FLAGS, "--n", "1", "--kappa", "-1")
    assert code == 0
    assert "0.1057848198" in out
    assert "1s1/2" in out


def test_level_json_fields(capsys):
    code, out, _ = run(capsys, "level", "--n", "2", "--kappa", "1", "--format", "json")
    rec = json.loads(out)
    assert code == 0
    assert set(rec) == {"energy", "lambda", "exponent", "status", "mode", "n", "kappa", "label"}
    assert rec["status"] == "bound" and rec["mode"] == "spin"
    assert abs(rec["energy"] - 0.191988313) <= 1e-6


def test_level_csv(capsys):
    code, out, _ = run(capsys, "level", "--n", "0", "--kappa", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["energy", "lambda", "exponent"]
    assert float(rows[1][0]) == pytest.approx(0.1518922615, abs=1e-9)


def test_level_zero_A_is_exit_2(capsys):
    code, out, _ = run(capsys, "level", *SPIN_FLAGS, "--n", "0", "--kappa", "-1")
    assert code == 2
    assert "no bound state (A = 0)" in out


def test_kappa_zero_is_config_error(capsys):
    code, _, err = run(capsys, "level", "--n", "0", "--kappa", "0")
    assert code == 1
    assert "kappa" in err


@pytest.mark.parametrize("flags, key", [(["--M", "-1"], "M"), (["--V0", "abc"], "V0"),
                                        (["--d0", "huge"], "d0"), (["--mode", "iso"], "mode"),
                                        (["--format", "xml"], "format"), (["--C", "inf"], "C")])
def test_bad_values_name_the_key(capsys, flags, key):
    code, _, err = run(capsys, "level", "--n", "1", "--kappa", "-1", *flags)
    assert code == 1
    assert err.startswith(f"error: {key}")


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["level", "--n", "1"])
    assert exc.value.code == 1
    capsys.readouterr()


def test_mirror_and_irregular_levels_are_labelled(capsys):
    _, out, _ = run(capsys, "level", "--n", "0", "--kappa", "-2")
    assert "mirror" in out
    _, out, _ = run(capsys, "level", "--n", "1", "--kappa", "-1")
    assert "irregular" in out


def test_pseudospin_level(capsys):
    code, out, _ = run(capsys, "level", "--mode", "pseudospin", "--C", "-30.1",
                       "--n", "1", "--kappa", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)["mode"] == "pseudospin"


# --- configuration ------------------------------------------------------------

def test_config_grammar():
    text = "# header\nM = 5\n\nV0=2  # trailing\nd0 = twelfth\n"
    assert parse_config_text(text) == {"M": "5", "V0": "2", "d0": "twelfth"}


@pytest.mark.parametrize("text, needle", [("Z = 1", "unknown key 'Z'"), ("M = 1\nM = 2", "twice"),
                                          ("M =", "no value"), ("M 1", "key = value")])
def test_config_errors(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config_text(text, "run.cfg")


def test_config_error_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("M = 10\nwidth = 3\n")
    code, _, err = run(capsys, "level", "--config", str(cfg), "--n", "1", "--kappa", "-1")
    assert code == 1
    assert "bad.cfg:2" in err and "width" in err


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run(capsys, "level", "--config", str(tmp_path / "nope.cfg"), "--n", "1", "--kappa", "-1")
    assert code == 1 and "config" in err


def test_precedence_flag_over_file_over_preset(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("H = 0.5\nformat = json\n")
    _, out, _ = run(capsys, "level", "--config", str(cfg), "--n", "0", "--kappa", "-1")
    assert abs(json.loads(out)["energy"] - 0.101446652) <= 1e-8
    _, out, _ = run(capsys, "level", "--config", str(cfg), "--H", "0", "--n", "1", "--kappa", "-1")
    assert abs(json.loads(out)["energy"] - 0.1057848200) <= 1e-8
    _, out, _ = run(capsys, "level", "--preset", "table3", "--format", "json", "--n", "3", "--kappa", "1")
    assert abs(json.loads(out)["energy"] - 0.2433208010) <= 1e-8


def test_output_is_deterministic(capsys):
    first = run(capsys, "table", "table2", "--format", "csv")[1]
    second = run(capsys, "table", "table2", "--format", "csv")[1]
    assert first == second


def test_number_format():
    assert fmt(0.1) == "0.1000000000"
    assert fmt(12345.678901234) == "12345.67890"
    assert fmt(None) == ""


# --- table --------------------------------------------------------------------

def _table_records(capsys, table_id):
    code, out, _ = run(capsys, "table", table_id, "--format", "json")
    assert code == 0
    return {(r["n"], r["kappa"], r["H"]): r for r in json.loads(out)}


def test_table2_values(capsys):
    recs = _table_records(capsys, "table2")
    assert len(recs) == 56
    assert abs(recs[(3, 1, 0.0)]["energy"] - 0.243203547) <= 1e-6
    assert abs(recs[(3, 1, 0.5)]["energy"] - 0.2729055754) <= 1e-6
    assert sum(r["within_tolerance"] for r in recs.values()) / 56 >= 0.9


def test_table3_value(capsys):
    recs = _table_records(capsys, "table3")
    assert abs(recs[(0, -1, 0.5)]["energy"] - 0.1014318359) <= 1e-6


def test_table_text_layout_flags_outliers(capsys):
    code, out, _ = run(capsys, "table", "table3")
    lines = out.splitlines()
    assert code == 0
    body = [ln for ln in lines if not ln.startswith("#") and "|" in ln][1:]
    assert len(body) == 16
    assert any(ln.rstrip().endswith("!") for ln in body)
    assert "cells agree within 1e-06" in lines[-1]


def test_table_csv_flags(capsys):
    _, out, _ = run(capsys, "table", "table2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 56
    assert {r["flag"] for r in rows} <= {"ok", "FLAG"}
    blanks = [r for r in rows if r["reference"] == ""]
    assert blanks and all(r["status"] == "none" for r in blanks)


# --- wavefunction -------------------------------------------------------------

def _wavefunction(capsys, n, kappa, *extra):
    code, out, _ = run(capsys, "wavefunction", "--n", str(n), "--kappa", str(kappa), *extra)
    header = [ln for ln in out.splitlines() if ln.startswith("#")]
    data = [ln for ln in out.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(data))))
    arr = {k: np.array([float(r[k]) for r in rows]) for k in ("r", "F", "G")} if rows else {}
    return code, header, arr


@pytest.mark.parametrize("n, kappa", [(0, 1), (2, 1), (3, 3)])
def test_wavefunction_export(capsys, n, kappa):
    code, header, arr = _wavefunction(capsys, n, kappa)
    assert code == 0
    assert f"n={n} kappa={kappa}" in header[0] and "M=10.00000000" in header[1]
    F = arr["F"]
    assert abs(F[0]) < 1e-6 * np.max(np.abs(F))
    signs = np.sign(F[np.abs(F) > 1e-12 * np.max(np.abs(F))])
    assert int(np.count_nonzero(signs[1:] != signs[:-1])) == n
    assert abs(trapezoid(F * F, arr["r"]) - 1.0) <= 1e-4


def test_wavefunction_no_state(capsys):
    code, header, _ = _wavefunction(capsys, 0, -1)
    assert code == 2 and "no bound state" in header[0]
    code, header, _ = _wavefunction(capsys, 0, -2)
    assert code == 2 and "mirror" in header[0]


def test_wavefunction_bad_range(capsys):
    code, _, err = run(capsys, "wavefunction", "--n", "0", "--kappa", "1", "--r-min", "5", "--r-max", "1")
    assert code == 1 and "r-min" in err


# --- verify -------------------------------------------------------------------

def test_verify_map_and_limits(capsys):
    code, out, _ = run(capsys, "verify", "--check", "map", "--check", "coulomb-limit",
                       "--check", "klein-gordon", "--check", "nonrelativistic")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert [c["check"] for c in report["checks"]] == ["map", "coulomb-limit", "klein-gordon",
                                                      "nonrelativistic"]


def test_verify_default_runs_oracle(capsys):
    code, out, _ = run(capsys, "verify")
    report = json.loads(out)
    assert code == 0
    (check,) = report["checks"]
    assert check["check"] == "oracle" and len(check["details"]["rows"]) == 28


def test_verify_table3_fails_with_exit_3(capsys):
    code, out, _ = run(capsys, "verify", "--check", "table3")
    report = json.loads(out)
    assert code == 3 and not report["passed"]
    outliers = report["checks"][0]["details"]["outliers"]
    assert any("oracle" in o for o in outliers)


# --- sweep --------------------------------------------------------------------

def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "1", "--kappa", "1", "--param", "H",
                       "--start", "0", "--stop", "0.5", "--steps", "5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    energies = [float(r["energy"]) for r in rows]
    assert energies == sorted(energies)


def test_sweep_reports_missing_levels(capsys):
    _, out, _ = run(capsys, "sweep", "--n", "0", "--kappa", "-1", "--param", "H",
                    "--start", "0", "--stop", "0.5", "--steps", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["status"] == "none" and rows[1]["status"] != "none"


def test_sweep_invalid_value(capsys):
    code, _, err = run(capsys, "sweep", "--n", "0", "--kappa", "1", "--param", "r0",
                       "--start", "-1", "--stop", "1", "--steps", "2")
    assert code == 1 and "r0" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hulthen_dirac", "level", "--n", "1", "--kappa", "-1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "0.1057848198" in proc.stdout
