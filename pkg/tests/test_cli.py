import io
import json
import subprocess
import sys

import pytest

from torzeta._numerics import resolve_threads
from torzeta.cli import parse_complex, run
from torzeta.spectrum import load_spectrum
from torzeta.zeta import log_ruelle


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    rc = run(list(argv), out, err)
    return rc, out.getvalue(), err.getvalue()


def test_gen_info_roundtrip(s_json):
    rc, out, _ = call("info", str(s_json))
    assert rc == 0
    rec = json.loads(out)
    spec = load_spectrum(s_json)
    assert rec["classes"] == len(spec)
    assert rec["systole"] == 1.0
    assert rec["cutoff"] == 8.0
    assert rec["growth_constant"] == spec.growth_constant


def test_gen_stdout_is_deterministic():
    argv = ("gen", "--seed", "7", "--systole", "1", "--cutoff", "8", "--density", "poisson-linear:3")
    assert call(*argv)[1] == call(*argv)[1]


def test_zeta_matches_library_bitwise(s_json):
    rc, out, _ = call("zeta", "--spectrum", str(s_json), "--kind", "ruelle", "--k", "4", "--s", "3+0i")
    assert rc == 0
    rec = json.loads(out)
    bv = log_ruelle(load_spectrum(s_json), 4, 3.0)
    assert rec["value"] == [bv.value.real, bv.value.imag]
    assert rec["tail_bound"] == bv.tail_bound
    assert rec["abscissa"] == 2.0
    assert rec["s"] == [3.0, 0.0]
    assert rec["kind"] == "ruelle" and rec["k"] == 4


def test_zeta_csv_json_same_numbers(s_json):
    base = ("zeta", "--spectrum", str(s_json), "--kind", "selberg", "--k", "-2", "--s", "3.5-1i")
    rec = json.loads(call(*base)[1])
    header, row = call(*base, "--format", "csv")[1].splitlines()
    flat = dict(zip(header.split(","), row.split(",")))
    assert float(flat["value_re"]) == rec["value"][0]
    assert float(flat["value_im"]) == rec["value"][1]
    assert float(flat["tail_bound"]) == rec["tail_bound"]


def test_zeta_rep_routes_agree(s_json):
    vals = []
    for route in ("direct", "chars", "selberg"):
        rc, out, _ = call("zeta", "--spectrum", str(s_json), "--kind", "ruelle-rep", "--weight", "2,1",
                          "--s", "6", "--route", route)
        assert rc == 0
        vals.append(json.loads(out)["value"])
    for v in vals[1:]:
        assert abs(complex(*v) - complex(*vals[0])) < 1e-12


def test_zeta_negated(s_json):
    rc, out, _ = call("zeta", "--spectrum", str(s_json), "--kind", "ruelle", "--k", "0", "--s", "3",
                      "--negated", "--vol", "1.5")
    assert rc == 0
    assert json.loads(out)["value"][0] > 0
    rc, _, err = call("zeta", "--spectrum", str(s_json), "--kind", "ruelle", "--k", "0", "--s", "3", "--negated")
    assert rc == 1 and "volume" in err


def test_divergence_exit_3(s_json):
    rc, _, err = call("zeta", "--spectrum", str(s_json), "--kind", "ruelle", "--k", "4", "--s", "1.5")
    assert rc == 3
    assert "k=4" in err and "abscissa" in err


def test_convergence_exit_3_names_cutoff(s_json):
    rc, _, err = call("torsion", "--spectrum", str(s_json), "--vol", "1", "--parity", "even", "--max-m", "5",
                      "--max-tail", "1e-12")
    assert rc == 3
    assert "cutoff R >=" in err


@pytest.mark.parametrize("argv", [
    ("zeta", "--kind", "ruelle", "--k", "1", "--s", "3"),
    ("zeta", "--spectrum", "x.json", "--kind", "bogus", "--k", "1", "--s", "3"),
    ("fit", "--spectrum", "x.json", "--vol", "1", "--m-min", "a", "--m-max", "3"),
    ("frobnicate",),
    (),
])
def test_bad_flags_exit_1(argv):
    assert call(*argv)[0] == 1


def test_bad_complex_exit_1(s_json):
    rc, _, err = call("zeta", "--spectrum", str(s_json), "--kind", "ruelle", "--k", "1", "--s", "3x")
    assert rc == 1 and "complex" in err


def test_missing_file_exit_1():
    assert call("info", "/nonexistent/s.json")[0] == 1


def test_csv_spectrum_needs_cutoff(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("length,theta,multiplicity\n1.0,0.0,1\n")
    rc, _, err = call("zeta", "--spectrum", str(p), "--kind", "ruelle", "--k", "0", "--s", "3")
    assert rc == 1 and "cutoff" in err
    rc, out, _ = call("zeta", "--spectrum", str(p), "--cutoff", "5", "--kind", "ruelle", "--k", "0", "--s", "3")
    assert rc == 0
    assert json.loads(out)["value"][0] == pytest.approx(-0.051069180942701596, abs=1e-16)


def test_identities_exit_codes(s_json):
    rc, out, _ = call("identities", "--spectrum", str(s_json), "--suite", "ruelle-selberg", "--tol", "1e-10")
    assert rc == 0
    doc = json.loads(out)
    assert doc["summary"]["failed"] == 0
    assert all("residual" in c and "tol" in c for c in doc["cases"])
    rc, _, _ = call("identities", "--spectrum", str(s_json), "--suite", "kostant", "--tol", "0", "--samples", "200")
    assert rc == 2


def test_torsion_csv_and_out_file(s_json, tmp_path):
    rc, out, _ = call("torsion", "--spectrum", str(s_json), "--vol", "1", "--parity", "odd", "--max-m", "6")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "M,parity,remainder,cumulative_minus_base,tail_bound"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [5, 7, 9, 11, 13]
    target = tmp_path / "t.csv"
    rc, out2, _ = call("torsion", "--spectrum", str(s_json), "--vol", "1", "--parity", "odd", "--max-m", "6",
                       "--out", str(target))
    assert rc == 0 and out2 == "" and target.read_text() == out
    rc, js, _ = call("torsion", "--spectrum", str(s_json), "--vol", "1", "--parity", "odd", "--max-m", "6",
                     "--format", "json")
    rows = json.loads(js)
    for row, line in zip(rows, lines[1:]):
        assert float(line.split(",")[3]) == row["cumulative_minus_base"]


def test_fit_json_keys(s_json):
    rc, out, _ = call("fit", "--spectrum", str(s_json), "--vol", "1", "--m-min", "20", "--m-max", "80")
    assert rc == 0
    rec = json.loads(out)
    for key in ("slope", "intercept", "recovered_volume", "injected_volume", "rel_error", "M_range",
                "max_abs_residual"):
        assert key in rec
    assert rec["M_range"] == [20, 80]
    assert rec["rel_error"] < 0.005


def test_fit_too_few_indices(s_json):
    rc, _, err = call("fit", "--spectrum", str(s_json), "--vol", "1", "--m-min", "20", "--m-max", "25")
    assert rc == 1 and "at least 8" in err


def test_trace_check(s_json):
    rc, out, _ = call("trace-check", "--spectrum", str(s_json), "--k", "2", "--grid", "0.5,1,2")
    assert rc == 0
    doc = json.loads(out)
    kinds = [r["identity"] for r in doc["records"]]
    assert kinds.count("identity-term") == 3
    assert "resolvent" in kinds and "gaussian-transform" in kinds


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("TORZETA_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2


def test_parse_complex():
    assert parse_complex("3") == 3
    assert parse_complex("3+0i") == 3
    assert parse_complex("4-2i") == complex(4, -2)
    assert parse_complex("1.5e0+2.5i") == complex(1.5, 2.5)


def test_module_entry_point(s_json):
    proc = subprocess.run([sys.executable, "-m", "torzeta", "info", str(s_json)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["cutoff"] == 8.0
