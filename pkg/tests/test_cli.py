"""End-to-end CLI runs: schemas, determinism, config precedence."""

import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest


def run_cli(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "wavekit.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
    )


def read_csv(path):
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return header, rows


MOMENT_ARGS = (
    "moments",
    "--dispersion",
    "rel",
    "--mass",
    "1",
    "--alpha",
    "1",
    "--beta-re",
    "0.5",
    "--method",
    "both",
)


def test_moments_both_methods(tmp_path):
    out = tmp_path / "m.csv"
    cp = run_cli(*MOMENT_ARGS, "--out", str(out))
    assert cp.returncode == 0, cp.stderr
    header, rows = read_csv(out)
    assert header == ["quantity", "closed", "quadrature", "abs_diff"]
    by_name = {r[0]: r for r in rows}
    for name, row in by_name.items():
        if name in ("uncertainty_bound", "saturation_residual"):
            continue
        if row[1] and row[2]:
            assert float(row[3]) <= 1e-8
    assert abs(float(by_name["saturation_residual"][2])) < 1e-7


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(*MOMENT_ARGS, "--out", str(a)).returncode == 0
    assert run_cli(*MOMENT_ARGS, "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().endswith(b"\n")


def test_json_matches_csv_values(tmp_path):
    c, j = tmp_path / "m.csv", tmp_path / "m.json"
    assert run_cli(*MOMENT_ARGS, "--out", str(c)).returncode == 0
    assert run_cli(*MOMENT_ARGS, "--format", "json", "--out", str(j)).returncode == 0
    _, rows = read_csv(c)
    data = json.loads(j.read_text())
    assert data["columns"] == ["quantity", "closed", "quadrature", "abs_diff"]
    for csv_row, json_row in zip(rows, data["rows"]):
        assert csv_row[0] == json_row[0]
        for s, v in zip(csv_row[1:], json_row[1:]):
            if s == "":
                assert v in (None, "")
            else:
                assert float(s) == v  # exact: both pass through %.15g


def test_evolve_grid_schema(tmp_path):
    out = tmp_path / "e.csv"
    cp = run_cli(
        "evolve",
        "--dispersion",
        "nonrel",
        "--mass",
        "3",
        "--alpha",
        "1",
        "--x-min",
        "-6",
        "--x-max",
        "6",
        "--x-steps",
        "61",
        "--t-min",
        "0",
        "--t-max",
        "2",
        "--t-steps",
        "3",
        "--out",
        str(out),
    )
    assert cp.returncode == 0, cp.stderr
    header, rows = read_csv(out)
    assert header == ["t", "x", "density"]
    assert len(rows) == 3 * 61
    assert all(float(r[2]) >= 0.0 for r in rows)


def test_spread_table(tmp_path):
    out = tmp_path / "s.csv"
    cp = run_cli(
        "spread",
        "--dispersion",
        "massless",
        "--alpha",
        "1",
        "--beta-re",
        "0.5",
        "--t-min",
        "0",
        "--t-max",
        "2",
        "--t-steps",
        "3",
        "--out",
        str(out),
    )
    assert cp.returncode == 0, cp.stderr
    header, rows = read_csv(out)
    assert header == ["t", "width_sq_analytic", "width_sq_grid", "abs_diff"]
    for row in rows:
        assert float(row[3]) <= 1e-5 * max(1.0, float(row[1]))


def test_boost_report(tmp_path):
    out = tmp_path / "b.csv"
    cp = run_cli(
        "boost",
        "--dispersion",
        "rel",
        "--mass",
        "1",
        "--alpha",
        "1",
        "--boost-u",
        "0.6",
        "--out",
        str(out),
    )
    assert cp.returncode == 0, cp.stderr
    header, rows = read_csv(out)
    assert header == ["quantity", "predicted", "recomputed", "abs_diff"]
    by_name = {r[0]: r for r in rows}
    assert float(by_name["alpha_prime"][1]) == pytest.approx(1.25)
    assert float(by_name["beta_r_prime"][1]) == pytest.approx(-0.75)
    assert float(by_name["norm"][3]) <= 1e-8
    assert float(by_name["mean_E_b"][3]) <= 1e-7
    assert float(by_name["uncertainty_excess_b"][2]) >= 1e-4


def test_cosmo_trace(tmp_path):
    out = tmp_path / "c.csv"
    cp = run_cli(
        "cosmo",
        "--dispersion",
        "massless",
        "--alpha",
        "1",
        "--beta-re",
        "0.5",
        "--model",
        "powerlaw",
        "--exponent",
        "1",
        "--t-min",
        "0",
        "--t-max",
        "2",
        "--t-steps",
        "3",
        "--out",
        str(out),
    )
    assert cp.returncode == 0, cp.stderr
    header, rows = read_csv(out)
    assert header == ["t", "mean_rho", "mean_rho2", "mean_x", "mean_v"]
    assert all(float(r[4]) == pytest.approx(0.5, abs=1e-9) for r in rows)


def test_figures_fig4_bimodal(tmp_path):
    out = tmp_path / "fig4.csv"
    cp = run_cli("figures", "--which", "4", "--out", str(out))
    assert cp.returncode == 0, cp.stderr
    header, rows = read_csv(out)
    assert header == ["beta", "t", "x", "density"]
    sel = [
        (float(r[2]), float(r[3]))
        for r in rows
        if float(r[0]) == 0.0 and float(r[1]) == 5.0
    ]
    xs = np.array([x for x, _ in sel])
    dens = np.array([d for _, d in sel])
    peaks = [
        xs[j]
        for j in range(1, len(xs) - 1)
        if dens[j] >= dens[j - 1] and dens[j] >= dens[j + 1] and dens[j] > 0.1 * dens.max()
    ]
    assert len(peaks) == 2
    assert abs(min(peaks) + 5.0) <= 0.5 and abs(max(peaks) - 5.0) <= 0.5


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps(
            {
                "dispersion": "rel",
                "mass": 1.0,
                "alpha": 1.0,
                "beta_re": 0.25,
                "method": "closed",
            }
        )
    )
    base = tmp_path / "base.csv"
    assert run_cli("moments", "--config", str(cfg), "--out", str(base)).returncode == 0
    _, rows = read_csv(base)
    mean_v = float({r[0]: r for r in rows}["mean_v"][1])
    assert mean_v == pytest.approx(0.25)

    over = tmp_path / "over.csv"
    cp = run_cli(
        "moments", "--config", str(cfg), "--beta-re", "0.5", "--out", str(over)
    )
    assert cp.returncode == 0
    _, rows = read_csv(over)
    assert float({r[0]: r for r in rows}["mean_v"][1]) == pytest.approx(0.5)


def test_bad_config_exit_code():
    cp = run_cli("moments", "--dispersion", "rel", "--mass", "1")  # missing alpha
    assert cp.returncode == 2
    assert "alpha" in cp.stderr
    cp = run_cli("moments", "--dispersion", "rel", "--mass", "1", "--alpha", "-1")
    assert cp.returncode == 2


def test_tolerance_env_and_flag(tmp_path):
    out = tmp_path / "t.json"
    cp = run_cli(
        *MOMENT_ARGS[:-2],
        "--method",
        "closed",
        "--format",
        "json",
        "--out",
        str(out),
        env_extra={"WAVEKIT_TOL": "1e-8"},
    )
    assert cp.returncode == 0, cp.stderr
    assert json.loads(out.read_text())["meta"]["tolerance"] == 1e-8
    cp = run_cli(
        *MOMENT_ARGS[:-2],
        "--method",
        "closed",
        "--format",
        "json",
        "--tol",
        "1e-9",
        "--out",
        str(out),
        env_extra={"WAVEKIT_TOL": "1e-8"},
    )
    assert cp.returncode == 0
    assert json.loads(out.read_text())["meta"]["tolerance"] == 1e-9
