import json

import numpy as np
import pytest

from hbts import parent_ham as ph
from hbts import tensor_core as tc
from hbts.cli import main, paper_lambda_path


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out


def test_validate_paper_fixture(tmp_path, capsys):
    out_file = str(tmp_path / "v.json")
    code, _ = run(["validate", "--isometry", paper_lambda_path(), "-o", out_file], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    assert doc["isometry"]["passed"] is True


def test_validate_bad_isometry_exits_one(tmp_path, capsys):
    bad = str(tmp_path / "bad.json")
    tc.save_isometry(tc.Isometry(2, np.ones((4, 2))), bad)
    code, out = run(["validate", "--isometry", bad], capsys)
    assert code == 1
    assert json.loads(out)["isometry"]["residual"] == 4.0


def test_random_isometry_round_trip(tmp_path, capsys):
    path = str(tmp_path / "iso.json")
    code, _ = run(["random-isometry", "--d", "3", "--seed", "11", "-o", path], capsys)
    assert code == 0
    code, _ = run(["validate", "--isometry", path], capsys)
    assert code == 0


def test_thermo_report(tmp_path, capsys):
    out_file = str(tmp_path / "t.json")
    code, _ = run(["thermo", "--isometry", "paper", "--nu", "4", "-o", out_file], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    assert doc["nu"] == 4 and doc["rank"] == 12 and doc["mixing"] is True


def test_exponents_sorted_by_modulus(tmp_path, capsys):
    out_file = str(tmp_path / "e.json")
    code, _ = run(["exponents", "--isometry", "paper", "-o", out_file], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    mods = [e["modulus"] for e in doc["entries"]]
    assert mods == sorted(mods, reverse=True)
    assert doc["diagonalizable"] is True


def test_correlate_row_count(tmp_path, capsys):
    out_file = str(tmp_path / "c.csv")
    code, _ = run(
        ["correlate", "--isometry", "paper", "--theta", "z", "--theta-prime", "z",
         "--m-max", "10", "-o", out_file], capsys)
    assert code == 0
    lines = open(out_file).read().strip().splitlines()
    assert lines[0] == "delta_alpha,re,im"
    assert len(lines) == 12  # header + 11 rows
    magnitudes = [abs(float(line.split(",")[1])) for line in lines[1:]]
    assert all(a >= b for a, b in zip(magnitudes, magnitudes[1:]))


def test_finite_check(tmp_path, capsys):
    out_file = str(tmp_path / "f.json")
    code, _ = run(["finite-check", "--isometry", "paper", "--top", "diag",
                   "--n-max", "3", "-o", out_file], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    assert doc["passed"] is True and doc["max_residual"] <= 1e-10


def test_parent_matches_library(tmp_path, capsys):
    out_file = str(tmp_path / "p.json")
    code, _ = run(["parent", "--isometry", "paper", "-o", out_file], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    hs = ph.build_interaction(tc.paper_isometry())
    assert doc["nu"] == hs.nu and doc["kernel_dim"] == hs.kernel_dim
    flat = np.array(doc["h_term"])
    mat = (flat[0::2] + 1j * flat[1::2]).reshape(16, 16)
    assert np.abs(mat - hs.h_term).max() < 1e-15


def test_diag_fig_report(tmp_path, capsys):
    out_file = str(tmp_path / "d.json")
    hist = str(tmp_path / "h.csv")
    eigs = str(tmp_path / "ev.csv")
    code, _ = run(["diag", "--isometry", "paper", "--N", "8", "-o", out_file,
                   "--histogram-csv", hist, "--eigenvalues-csv", eigs], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    assert doc["degeneracy"] == 32
    assert len(doc["spectrum"]) == 256
    assert open(hist).readline().strip() == "bin_left,bin_right,count"
    assert len(open(eigs).read().strip().splitlines()) == 257


def test_subspace_check(tmp_path, capsys):
    out_file = str(tmp_path / "s.json")
    code, _ = run(["subspace-check", "--isometry", "paper", "--N", "8", "-o", out_file], capsys)
    assert code == 0
    doc = json.loads(open(out_file).read())
    assert doc["dim_union"] == 32 and doc["unfrustrated"] is True


def test_mera_bounds_stdout(capsys):
    code, out = run(["mera-bounds", "--topology", "ternary", "--d", "2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert (doc["nu"], doc["bound"], doc["max"]) == (7, 96, 128)


def test_resource_error_exits_two(capsys):
    code, _ = run(["diag", "--isometry", "paper", "--N", "20"], capsys)
    assert code == 2


def test_missing_file_exits_two(capsys):
    code, _ = run(["thermo", "--isometry", "no-such-file.json"], capsys)
    assert code == 2


def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_reruns_are_byte_identical(tmp_path, capsys):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    for target in (a, b):
        assert main(["diag", "--isometry", "paper", "--N", "6", "-o", target]) == 0
    capsys.readouterr()
    assert open(a, "rb").read() == open(b, "rb").read()
