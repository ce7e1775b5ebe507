import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.special import erf

import main
from contraction import Params
from picard import solve_phi
from utils import read_csv, write_csv

FAST = ["--steps", "4000"]


def run_cli(*argv):
    return main.main([str(a) for a in argv])


def sidecar_of(out):
    return json.loads(Path(str(out) + ".meta.json").read_text())


def test_phi_classical(tmp_path):
    out = tmp_path / "phi.csv"
    assert run_cli("phi", "--delta", 0, "--gamma", 0, "--output", out) == 0

    columns = read_csv(str(out))
    assert list(columns) == ["x", "phi"]
    x = np.array(columns["x"])
    phi = np.array(columns["phi"])
    assert np.max(np.abs(phi - erf(x))) <= 1e-8

    meta = sidecar_of(out)
    assert meta["command"] == "phi"
    assert meta["exit_code"] == 0
    assert meta["solutions"][0]["converged_under_guarantee"] is True


def test_phi_csv_round_trips_bit_exactly(tmp_path):
    out = tmp_path / "phi.csv"
    run_cli("phi", "--delta", 0.1, "--gamma", 0.1, "--output", out)
    sol = solve_phi(Params(0.1, 0.1))
    columns = read_csv(str(out))
    assert np.array_equal(np.array(columns["phi"]), sol.phi.values)
    assert np.array_equal(np.array(columns["x"]), sol.phi.grid.points)


def test_phi_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli("phi", "--delta", 0.1, "--gamma", -0.1, "--output", first)
    run_cli("phi", "--delta", 0.1, "--gamma", -0.1, "--output", second)
    assert first.read_bytes() == second.read_bytes()


def test_phi_json_format(tmp_path):
    out = tmp_path / "phi.json"
    assert run_cli("phi", "--delta", 0, "--gamma", 0, "--format", "json", "--output", out) == 0
    data = json.loads(out.read_text())
    assert set(data) == {"x", "phi"}
    assert len(data["x"]) == 2001


def test_phi_domain_violation(tmp_path, capsys):
    assert run_cli("phi", "--delta", -1.5, "--gamma", 0, "--output", tmp_path / "x.csv") == 1
    assert "delta outside (−1,∞)" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_phi_both_methods(tmp_path):
    out = tmp_path / "both.csv"
    assert run_cli("phi", "--delta", 0.1, "--gamma", 0.1, "--method", "both", "--output", out, *FAST) == 0
    columns = read_csv(str(out))
    assert list(columns) == ["x", "phi_picard", "phi_shooting", "diff"]
    assert np.max(np.abs(columns["diff"])) <= 1e-6
    assert len(columns["x"]) == 4001


@pytest.mark.slow
def test_phi_shooting_outside_region(tmp_path):
    out = tmp_path / "outside.csv"
    code = run_cli("phi", "--delta", 1.5, "--gamma", -0.6, "--method", "shooting", "--output", out, *FAST)
    assert code == 2
    phi = np.array(read_csv(str(out))["phi"])
    assert phi.min() >= 0.0 and phi.max() <= 1.0
    assert np.all(np.diff(phi) >= 0.0)


@pytest.mark.slow
def test_phi_family(tmp_path):
    out = tmp_path / "family.csv"
    code = run_cli("phi", "--delta", 1.5, "--gammas", 0, 1, "--method", "shooting", "--output", out, *FAST)
    assert code == 2
    columns = read_csv(str(out))
    assert list(columns) == ["x", "phi_d1.5_g0", "phi_d1.5_g1"]
    for name in ("phi_d1.5_g0", "phi_d1.5_g1"):
        assert columns[name][-1] == pytest.approx(1.0, abs=1e-10)


def test_phi_family_needs_fixed_parameter(tmp_path, capsys):
    assert run_cli("phi", "--gammas", 0, 1, "--output", tmp_path / "f.csv") == 1
    assert "--gammas needs --delta" in capsys.readouterr().err


def test_region_defaults(tmp_path):
    out = tmp_path / "region.csv"
    assert run_cli("region", "--output", out) == 0

    records = read_csv(str(out))
    assert list(records) == ["delta", "gamma", "M", "in_region"]
    rows = list(zip(records["delta"], records["gamma"], records["M"], records["in_region"]))
    assert (0.0, 0.0, 0.0, 1.0) in rows
    assert set(records["in_region"]) == {0.0, 1.0}

    edges = read_csv(str(tmp_path / "region_boundary.csv"))
    assert list(edges) == ["gamma", "delta_star", "delta_star_lower"]
    i = edges["gamma"].index(0.0)
    assert edges["delta_star"][i] == pytest.approx(0.2278, abs=1e-3)
    assert edges["delta_star_lower"][i] < 0.0

    meta = sidecar_of(out)
    assert meta["earlier_boundary_gamma0"] < edges["delta_star"][i]


def test_region_single_cell(tmp_path):
    out = tmp_path / "cell.csv"
    args = ["--delta-min", 0, "--delta-max", 0, "--gamma-min", 0, "--gamma-max", 0, "--resolution", 1]
    assert run_cli("region", *args, "--output", out) == 0
    records = read_csv(str(out))
    assert records == {"delta": [0.0], "gamma": [0.0], "M": [0.0], "in_region": [1.0]}


def test_region_reversed_range(tmp_path, capsys):
    assert run_cli("region", "--delta-min", 1, "--delta-max", 0, "--output", tmp_path / "r.csv") == 1
    assert "reversed" in capsys.readouterr().err


def test_verify_classical(tmp_path):
    out = tmp_path / "verify.json"
    assert run_cli("verify", "--delta", 0, "--gamma", 0, "--output", out, *FAST) == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert report["picard"]["passed"] is True
    assert report["shooting"]["passed"] is True
    assert report["cross_method_diff"] <= 1e-6


def test_verify_inside_region(tmp_path):
    out = tmp_path / "verify.json"
    assert run_cli("verify", "--delta", 0.1, "--gamma", 0.1, "--output", out, *FAST) == 0
    report = json.loads(out.read_text())
    assert report["cross_method_ok"] is True
    assert report["picard"]["concave_ok"] is True


def test_verify_selftest_corrupt(tmp_path):
    out = tmp_path / "verify.json"
    assert run_cli("verify", "--delta", 0, "--gamma", 0, "--selftest", "corrupt", "--output", out, *FAST) != 0
    report = json.loads(out.read_text())
    assert report["passed"] is False
    assert report["picard"]["monotone_ok"] is False


def test_compare_inside_region(tmp_path):
    out = tmp_path / "compare.json"
    assert run_cli("compare", "--delta", 0.1, "--gamma", -0.1, "--output", out, *FAST) == 0
    report = json.loads(out.read_text())
    assert report["agree"] is True
    assert report["sup_diff"] <= 1e-6


def test_stefan_classical(tmp_path):
    out = tmp_path / "stefan.json"
    assert run_cli("stefan", "--alpha", 0, "--beta", 0, "--lambda", 1.0, "--output", out) == 0
    report = json.loads(out.read_text())
    assert report["delta"] == 0.0
    assert report["gamma"] == 0.0
    assert report["phi_at_lambda"] == pytest.approx(0.8427008, abs=1e-7)
    assert report["heat_capacity"] == "constant"


def test_stefan_signs(tmp_path):
    out = tmp_path / "stefan.json"
    assert run_cli("stefan", "--alpha", 0.05, "--beta", -0.05, "--lambda", 0.5, "--output", out) == 0
    report = json.loads(out.read_text())
    assert report["gamma"] > 0.0
    assert report["delta"] < 0.0
    assert report["thermal_conductivity"] == "decreasing"


def test_stefan_negative_lambda(tmp_path, capsys):
    assert run_cli("stefan", "--alpha", 0.1, "--beta", 0.1, "--lambda", -1, "--output", tmp_path / "s.json") == 1
    assert "lambda must be positive" in capsys.readouterr().err


def test_stefan_sweep_cap_writes_residuals(tmp_path, capsys):
    out = tmp_path / "s.json"
    args = ["--alpha", 0.05, "--beta", -0.05, "--lambda", 0.5, "--max-sweeps", 1]
    assert run_cli("stefan", *args, "--output", out) == 1
    report = json.loads(out.read_text())
    assert report["converged"] is False
    assert report["residual_alpha"] > 0.0
    assert "did not converge" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [[], ["unknown"], ["phi", "--delta", "abc", "--gamma", "0"], ["phi", "--format", "xml"], ["verify", "--delta", "0"]],
)
def test_usage_errors_exit_one(argv, capsys):
    assert run_cli(*argv) == 1
    assert "usage error" in capsys.readouterr().err


def test_verbose_logs_memory(tmp_path, capsys):
    run_cli("phi", "--delta", 0, "--gamma", 0, "--verbose", "--output", tmp_path / "v.csv")
    out = capsys.readouterr().out
    assert "[MEMORY]" in out
    assert "[PICARD] iter 1" in out


def test_csv_writer_is_lossless(tmp_path):
    path = tmp_path / "lossless.csv"
    values = [math.pi, 1e-300, 0.1 + 0.2, -2.5e17, 1.0 - 2.0 ** -53]
    write_csv(str(path), ["value", "flag"], [(v, i % 2 == 0) for i, v in enumerate(values)])
    columns = read_csv(str(path))
    assert columns["value"] == values
    assert columns["flag"] == [1.0, 0.0, 1.0, 0.0, 1.0]
    assert path.read_text().splitlines()[3] == "0.30000000000000004,1"


def test_csv_writer_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    rows = [(0.1, 1.0 / 3.0), (math.e, -0.0)]
    write_csv(str(path), ["a", "b"], rows)
    assert path.read_text().endswith("\n")
    assert "\r" not in path.read_text()
    assert read_csv(str(path)) == {"a": [0.1, math.e], "b": [1.0 / 3.0, -0.0]}


def test_format_defaults_are_per_command(tmp_path):
    args = main.build_parser().parse_args(["phi", "--delta", "0", "--gamma", "0"])
    assert args.format == "csv"
    args = main.build_parser().parse_args(["verify", "--delta", "0", "--gamma", "0"])
    assert args.format == "json"


def test_verify_sidecar_has_contraction_constant(tmp_path):
    out = tmp_path / "verify.json"
    run_cli("verify", "--delta", 0.1, "--gamma", 0.1, "--output", out, *FAST)
    meta = sidecar_of(out)
    assert meta["M"] == pytest.approx(json.loads(out.read_text())["M"])
    assert meta["exit_code"] == 0


def test_verify_outside_region_falls_back_to_shooting(tmp_path, monkeypatch):
    import commands.verify

    def leaves_k(p, opts):
        raise ValueError("solution leaves [0, 1]")

    monkeypatch.setattr(commands.verify, "solve_phi", leaves_k)
    out = tmp_path / "verify.json"
    assert run_cli("verify", "--delta", 0.3, "--gamma", 0, "--output", out, *FAST) == 0
    report = json.loads(out.read_text())
    assert report["in_region"] is False
    assert "picard" not in report
    assert report["shooting"]["passed"] is True


def test_verify_inside_region_propagates_picard_failure(tmp_path, monkeypatch, capsys):
    import commands.verify

    def leaves_k(p, opts):
        raise ValueError("solution leaves [0, 1]")

    monkeypatch.setattr(commands.verify, "solve_phi", leaves_k)
    assert run_cli("verify", "--delta", 0.1, "--gamma", 0.1, "--output", tmp_path / "v.json", *FAST) == 1
    assert "solution leaves [0, 1]" in capsys.readouterr().err


@pytest.mark.parametrize("method, message", [("picard", "x_max_override must be positive"), ("shooting", "x_max must be positive")])
def test_zero_xmax_is_rejected(tmp_path, capsys, method, message):
    out = tmp_path / "phi.csv"
    assert run_cli("phi", "--delta", 0, "--gamma", 0, "--method", method, "--xmax", 0, "--output", out) == 1
    assert message in capsys.readouterr().err
    assert not out.exists()


def test_stefan_with_material_reports_slopes(tmp_path):
    out = tmp_path / "stefan.json"
    material = ["--c-ref", 2000, "--k-ref", 0.2, "--theta-i", 330, "--theta-o", 300]
    assert run_cli("stefan", "--alpha", 0.05, "--beta", -0.05, "--lambda", 0.5, *material, "--output", out) == 0
    report = json.loads(out.read_text())
    assert report["specific_heat_slope"] == pytest.approx(2000.0 * 0.05 / 30.0)
    assert report["conductivity_slope"] == pytest.approx(-0.2 * 0.05 / 30.0)
    assert report["gamma"] > 0.0 > report["delta"]


def test_stefan_material_flags_go_together(tmp_path, capsys):
    args = ["--alpha", 0.05, "--beta", -0.05, "--lambda", 0.5, "--c-ref", 2000]
    assert run_cli("stefan", *args, "--output", tmp_path / "s.json") == 1
    assert "go together" in capsys.readouterr().err
