import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qjfock.assembly import GWTable, synthetic_hae_table
from qjfock.cli import parse_poly, parse_window, run
from qjfock.genpoly import GenPoly
from qjfock.series import series_from_json, view_from_json

G = GenPoly.gen


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand_theta_json(capsys):
    code, out, _ = call(capsys, "expand", "--gen", "Theta", "--qmax", "5", "--json")
    assert code == 0
    obj = json.loads(out)
    f = series_from_json(obj)
    assert f.qmax == 5
    q0 = [c for c in obj["coeffs"] if c["d"] == 0][0]
    assert sorted(q0["num"]) == [[-1, "-1/1"], [1, "1/1"]]


def test_expand_with_window(capsys):
    code, out, _ = call(capsys, "expand", "--poly", "Theta^2", "--qmax", "2", "--window", "-1:1", "--json")
    v = view_from_json(json.loads(out))
    assert code == 0 and [v.c(0, r) for r in (-1, 0, 1)] == [1, -2, 1]


def test_expand_negative_leading_poly(capsys):
    code, out, _ = call(capsys, "expand", "--poly", "-Theta^2*Delta_inv", "--qmax", "1", "--window", "-1:1")
    assert code == 0 and "q^-1 p^1: -1" in out


def test_anomaly(capsys):
    code, out, _ = call(capsys, "anomaly", "--poly", "G2^2", "--json")
    assert code == 0
    assert GenPoly.from_json(json.loads(out)["genpoly"]) == G("G2") * 2


def test_hecke_ell_zero_is_usage_error(capsys):
    code, _, _ = call(capsys, "hecke", "--gen", "G2", "--k", "4", "--ell", "0")
    assert code == 2


def test_hecke_decompose(capsys):
    code, out, _ = call(capsys, "hecke", "--gen", "G4", "--k", "5", "--ell", "2", "--decompose", "--json",
                        "--window", "0:0")
    obj = json.loads(out)
    assert code == 0
    assert obj["terms"] == [{"e": 1, "c": "1/1", "d": 2}, {"e": 2, "c": "8/1", "d": 1}]


def test_unknown_generator_domain_error(capsys):
    code, out, err = call(capsys, "expand", "--gen", "Nope", "--json")
    assert code == 1
    assert "UnknownGenerator" in err
    assert json.loads(out)["error"] == "UnknownGenerator"


def test_unknown_subcommand_and_flag(capsys):
    assert call(capsys, "bogus")[0] == 2
    assert call(capsys, "expand", "--gen", "Theta", "--frobnicate")[0] == 2


def test_fock_apply_and_pair(capsys):
    part = json.dumps([{"part": 1, "class": "pt"}, {"part": 1, "class": "pt"}])
    code, out, _ = call(capsys, "fock", "apply", "--op", "U", "--partition", part, "--json")
    assert code == 0 and json.loads(out)
    v = json.dumps([{"part": 2, "class": "pt"}])
    w = json.dumps([{"part": 2, "class": "1"}])
    code, out, _ = call(capsys, "fock", "pair", "--v", v, "--w", w, "--json")
    # class_of_partition carries 1/2 on each side
    assert code == 0 and Fraction(json.loads(out)["pairing"]) == Fraction(-1, 2)


def test_fock_unsupported(capsys):
    part = json.dumps([{"part": 1, "class": "pt"}])
    code, _, err = call(capsys, "fock", "apply", "--op", "f_delta", "--partition", part)
    assert code == 1 and "UnsupportedClass" in err


def test_assemble_commands(capsys):
    code, out, _ = call(capsys, "assemble", "e8", "--qmax", "4", "--twist", "2", "--json")
    f = series_from_json(json.loads(out))
    assert code == 0 and [f.q_coeff(d) for d in range(5)] == [1, 0, 240, 0, 2160]
    code, out, _ = call(capsys, "assemble", "twopoint", "--n", "2", "--json")
    assert json.loads(out)["weight"] == -10
    code, out, _ = call(capsys, "assemble", "dt", "--n", "1", "--json")
    assert json.loads(out)["level"] == 2 and json.loads(out)["weight"] == -6
    code, out, _ = call(capsys, "assemble", "fiber", "--b", "3", "--inv0", "24", "--qmax", "3", "--window", "0:0")
    assert code == 0 and "q^1 p^0: 24" in out and "q^2 p^0: 216" in out
    code, _, _ = call(capsys, "assemble", "fiber", "--a", "-1")
    assert code == 1


def test_assemble_lift(capsys):
    code, out, _ = call(capsys, "assemble", "lift", "--poly", "-Theta^2*Delta_inv", "--k", "-10", "--e", "1",
                        "--ell", "2", "--qmax", "2", "--window", "-2:2", "--json")
    v = view_from_json(json.loads(out))
    assert code == 0 and v.c(-2, 1) == 0 and v.c(-2, 2) == Fraction(-2, 2 ** 11)


def test_assemble_hae(capsys, tmp_path):
    lams = [[(1, "W"), (1, "1")], [(1, "F"), (1, "1")], [(1, "pt"), (1, "1")]]
    table, _ = synthetic_hae_table(lams, 2, 3, seed=1)
    path = tmp_path / "table.json"
    path.write_text(json.dumps(table.to_json()))
    lam_json = json.dumps([[{"part": k, "class": c} for k, c in lam] for lam in lams])
    code, out, _ = call(capsys, "assemble", "hae", "--table", str(path), "--lambdas", lam_json, "--n", "2",
                        "--qmax", "3", "--json")
    assert code == 0 and view_from_json(json.loads(out)).is_zero()
    assert GWTable.from_json(json.loads(path.read_text())) == table


def test_verify_suite(capsys):
    code, out, _ = call(capsys, "verify", "series")
    assert code == 0 and "FAIL" not in out and out.count("PASS") == 3


def test_deterministic_output(capsys):
    argv = ["expand", "--poly", "Theta^2*(wp + 2*G2)", "--qmax", "6", "--json"]
    code, first, _ = call(capsys, *argv)
    assert code == 0 and series_from_json(json.loads(first)).q_coeff(0) == 1
    assert call(capsys, *argv)[1] == first


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qjfock", "hecke", "--gen", "G2", "--k", "4", "--ell", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


def test_parsers():
    assert parse_poly("-Theta^2*Delta_inv + 1/2*G2") == GenPoly.monomial(-1, Theta=2, Delta_inv=1) + G("G2") * Fraction(1, 2)
    assert parse_poly(json.dumps(G("A").to_json())) == G("A")
    assert parse_poly("Theta^2*(wp + 2*G2)") == G("Theta", 2) * (G("wp") + G("G2") * 2)
    assert parse_poly("Theta^-2") == G("Theta_inv", 2)
    assert parse_window("-3:5/2") == (Fraction(-3), Fraction(5, 2))
