import csv
import json

import numpy as np
import pytest

from kptau.cli import format_residual, format_scalar, main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def test_formatters():
    from fractions import Fraction
    assert format_scalar(Fraction(5, 3)) == "5/3"
    assert format_scalar(0.1) == "0.1"
    assert format_residual(Fraction(0)) == "0 (exact)"
    assert format_residual(1.5e-12) == "1.500e-12"


def test_build_rational_exact(capsys, configs):
    code, out, _ = _run(capsys, "build", configs / "rational.json")
    assert code == 0
    assert "rank-1 residual: 0 (exact)" in out
    assert out.strip().endswith("PASS")


@pytest.mark.parametrize("name", ["soliton.json", "cauchy.json", "calogero_moser.json", "generic_jordan.json"])
def test_build_float_families(capsys, configs, name):
    code, out, _ = _run(capsys, "build", configs / name)
    assert code == 0 and "PASS" in out


def test_tau_value_and_forms(capsys, configs):
    code, out, _ = _run(capsys, "tau", configs / "rational.json", "2")
    assert code == 0 and out.strip() == "13"
    code, out, _ = _run(capsys, "tau", configs / "rational.json", "2", "--all-forms")
    lines = out.strip().splitlines()
    assert lines[0] == "13"
    assert sum(line.endswith(": 13") for line in lines) == 3
    assert "max pairwise relative difference: 0 (exact)" in out


def test_tau_fraction_argument(capsys, configs):
    code, out, _ = _run(capsys, "tau", configs / "rational.json", "1/5")
    assert code == 0 and out.strip() == "4"


def test_tau_too_many_times(capsys, configs):
    code, _, err = _run(capsys, "tau", configs / "soliton.json", "0.1", "0.1", "0.1", "0.1")
    assert code == 2 and "K = 3" in err


def test_expand_rational(capsys, configs):
    code, out, _ = _run(capsys, "expand", configs / "rational.json")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "# EXACT (finite)"
    assert lines[1] == "partition,frobenius,raw,coefficient,unnormalized,sign_flag"
    rows = [line.split(",")[0:4:3] for line in lines[2:]]
    assert rows == [["∅", "1"], ["(1)", "5/3"]]


def test_expand_all_rows_and_no_marker(capsys, configs):
    _, out, _ = _run(capsys, "expand", configs / "rational.json", "--all-rows")
    assert len(out.strip().splitlines()) == 2 + 12  # every partition of weight <= 4
    _, out, _ = _run(capsys, "expand", configs / "rational_2x2.json", "--max-weight", "3")
    assert not out.startswith("#")


def test_expand_soliton_to_csv(capsys, configs, tmp_path):
    out_path = tmp_path / "sub" / "coeffs.csv"
    code, _, _ = _run(capsys, "expand", configs / "soliton.json", "--max-weight", "12", "--out", out_path)
    assert code == 0
    rows = _read_csv(out_path)
    assert len(rows) == 13
    for row in rows:
        w = 0 if row["partition"] == "∅" else int(row["partition"].strip("()"))
        assert abs(float(row["coefficient"]) - (0.5**w + (-0.3) ** w) / 2) < 1e-15
    assert out_path.with_suffix(".png").stat().st_size > 0


def test_verify_exact_zero(capsys, configs, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = _run(capsys, "verify", configs / "rational.json", "--samples", "10", "--out", out_path)
    assert code == 0
    assert "EXACT ZERO" in out
    summary = json.loads(out_path.read_text())
    assert summary["passed"] and summary["samples"] == 10


def test_verify_corrupt_fails(capsys, configs):
    code, out, _ = _run(capsys, "verify", configs / "soliton.json", "--samples", "5", "--corrupt")
    assert code == 1
    assert '"passed": false' in out


def test_verify_same_seed_is_deterministic(capsys, configs):
    runs = [_run(capsys, "verify", configs / "cauchy.json", "--samples", "5", "--seed", "7")[1] for _ in range(2)]
    assert runs[0] == runs[1]


def test_input_errors(capsys, tmp_path, configs):
    code, _, err = _run(capsys, "build", _write(tmp_path, {"family": "soliton", "betas": [0.5, 0.5], "C": [[1, 1]]}))
    assert code == 2 and "EigenvalueCollision" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"family": "rational",\n  "n": }')
    code, _, err = _run(capsys, "build", bad)
    assert code == 2 and "line 2 column" in err
    code, _, err = _run(capsys, "build", tmp_path / "missing.json")
    assert code == 2
    code, _, err = _run(capsys, "tau", configs / "rational.json", "abc")
    assert code == 2 and "bad flow time" in err


def test_degenerate_exit_code(capsys, tmp_path):
    cfg = _write(tmp_path, {"family": "rational", "n": 2, "k": 1, "C": [[0, 0, 1], [0, 1, 0]]})
    code, _, err = _run(capsys, "expand", cfg)
    assert code == 3 and "SingularAtOrigin" in err


def test_grid_soliton_peak(capsys, configs, tmp_path):
    out_path = tmp_path / "grid" / "u.csv"
    code, out, _ = _run(capsys, "grid", configs / "soliton.json", "--x", "-20", "20", "401", "--out", out_path)
    assert code == 0 and "401 rows" in out
    rows = _read_csv(out_path)
    assert list(rows[0]) == ["x", "y", "t", "u", "flag"]
    u = np.array([float(r["u"]) for r in rows])
    # one-soliton peak height (beta1 - beta2)^2 / 2
    assert abs(u.max() - 0.32) < 1e-4
    assert out_path.with_suffix(".png").stat().st_size > 0


def test_grid_constant_tau_gives_zero(capsys, tmp_path):
    cfg = _write(tmp_path, {"family": "rational", "n": 1, "k": 1, "C": [[1, 0]]})
    code, _, _ = _run(capsys, "grid", cfg, "--x", "-1", "1", "5", "--no-plot", "--out", tmp_path / "u.csv")
    assert code == 0
    assert all(float(r["u"]) == 0 for r in _read_csv(tmp_path / "u.csv"))
    assert not (tmp_path / "u.png").exists()


def test_grid_flags_zero_of_tau(capsys, configs, tmp_path):
    # tau = 3 + 5 x vanishes at x = -0.6
    code, out, _ = _run(capsys, "grid", configs / "rational.json", "--x", "-1", "0", "11", "--no-plot",
                        "--out", tmp_path / "u.csv")
    rows = _read_csv(tmp_path / "u.csv")
    flagged = [r for r in rows if r["flag"] == "1"]
    assert len(flagged) == 1 and abs(float(flagged[0]["x"]) + 0.6) < 1e-12
    assert flagged[0]["u"] == "nan"
    ok = [r for r in rows if r["flag"] == "0"]
    for r in ok:
        x = float(r["x"])
        assert abs(float(r["u"]) + 50 / (3 + 5 * x) ** 2) < 1e-4 * 50 / (3 + 5 * x) ** 2


def test_grid_calogero_moser_pole_moves(capsys, configs, tmp_path):
    # n = 1: tau ~ 1 + x + 2 beta y, pole of u at x = -1 - 2 beta y
    code, _, _ = _run(capsys, "grid", configs / "calogero_moser.json", "--x", "-3", "1", "401", "--y", "-1", "1", "3",
                      "--no-plot", "--out", tmp_path / "u.csv")
    assert code == 0
    rows = _read_csv(tmp_path / "u.csv")
    for y in (-1.0, 0.0, 1.0):
        sel = [r for r in rows if float(r["y"]) == y and r["flag"] == "0"]
        peak = max(sel, key=lambda r: abs(float(r["u"])))
        assert abs(float(peak["x"]) - (-1 - 2 * 0.5 * y)) < 0.02


def test_grid_bad_axes(capsys, configs, tmp_path):
    code, _, _ = _run(capsys, "grid", configs / "soliton.json", "--axes", "1", "1", "2", "--out", tmp_path / "u.csv")
    assert code == 2
