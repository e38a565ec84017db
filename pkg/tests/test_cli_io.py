import re

import numpy as np
import pytest

from fjerk import cli, output
from fjerk.chaos import LyapunovSpectrum, SweepPoint, SweepResult
from fjerk.model import JerkParams, OrderSpec
from fjerk.solver import SolveConfig, Trajectory


def run_cli(argv):
    return cli.main(argv)


def read(path):
    with open(path) as fh:
        return fh.read()


# ---------------------------------------------------------------- formatting


def test_fmt_round_trips_doubles():
    rng = np.random.default_rng(12)
    for v in rng.uniform(-1e6, 1e6, size=200):
        assert float(output.fmt(v)) == v
    for v in (0.1, 1.0 / 3.0, np.pi, 1e-300, -2.5e17):
        assert float(output.fmt(v)) == v


# ---------------------------------------------------------------- CSV writers


def make_traj(n=5):
    t = 0.01 * np.arange(n)
    states = np.arange(3 * n, dtype=float).reshape(n, 3) / 7.0
    return Trajectory(t, states, SolveConfig(h=0.01, t_end=t[-1] if n > 1 else 0.01),
                      OrderSpec.commensurate(0.9))


def test_trajectory_csv_round_trip(tmp_path):
    traj = make_traj(9)
    path = tmp_path / "traj.csv"
    output.write_trajectory_csv(traj, path)
    text = read(path)
    assert text.splitlines()[0] == "t,x,y,z"
    assert len(text.splitlines()) == 10
    assert "\r" not in text
    data = output.read_trajectory_csv(path)
    assert np.array_equal(data[:, 0], traj.t)
    assert np.array_equal(data[:, 1:], traj.states)


def test_sweep_csv_divergent_rows(tmp_path):
    params = JerkParams(0.129, 7.0, 0.0)
    orders = OrderSpec.commensurate(0.9)
    cfg = SolveConfig(h=0.01, t_end=1.0)
    points = [
        SweepPoint(1.0, np.array([2.0, 3.0]), np.array([-1.0]), None),
        SweepPoint(2.0, np.empty(0), np.empty(0), None, True, 0.5),
    ]
    res = SweepResult(np.array([1.0, 2.0]), points, params, orders, cfg, 0.3)
    path = tmp_path / "sweep.csv"
    output.write_sweep_csv(res, path)
    lines = read(path).splitlines()
    assert lines[0] == "epsilon,kind,x_value"
    assert len(lines) == 5
    assert lines[1].startswith("1,max,")
    assert lines[4] == "2,divergent,"


def test_lyapunov_csv(tmp_path):
    spec = LyapunovSpectrum((0.19, -0.002, -1.1), 200.0, 150, True)
    path = tmp_path / "ly.csv"
    output.write_lyapunov_csv([(7.9, spec), (8.0, None)], path)
    lines = read(path).splitlines()
    assert lines[0] == "epsilon,lambda1,lambda2,lambda3,converged"
    assert lines[1].endswith(",true")
    assert lines[2] == "8,,,,"


# ---------------------------------------------------------------- SVG rendering


def test_bifurcation_svg_one_marker(tmp_path):
    path = tmp_path / "one.svg"
    output.render_svg([(1.0, 2.0)], "bifurcation", path)
    text = read(path)
    assert text.startswith("<svg")
    assert text.count("<circle") == 1


def test_lyapunov_svg_zero_line(tmp_path):
    path = tmp_path / "ly.svg"
    data = [(1.0, (0.1, 0.0, -0.5)), (2.0, (0.2, -0.01, -0.6))]
    output.render_svg(data, "lyapunov", path)
    text = read(path)
    assert 'class="zero-line"' in text
    assert text.count("<polyline") == 3


def test_portrait_svg_monotone_mapping(tmp_path):
    traj = make_traj(50)
    path = tmp_path / "p.svg"
    output.render_svg(traj, "portrait", path, plane="xz")
    text = read(path)
    pts = re.search(r'<polyline points="([^"]+)"', text).group(1).split()
    assert len(pts) == 50
    xs = [float(p.split(",")[0]) for p in pts]
    # data x is increasing, so pixel x must be strictly increasing too
    assert all(u < v for u, v in zip(xs, xs[1:]))


def test_render_svg_rejects_unknown_kind(tmp_path):
    with pytest.raises(ValueError):
        output.render_svg([(1.0, 2.0)], "pie-chart", tmp_path / "x.svg")
    with pytest.raises(ValueError):
        output.render_svg(make_traj(), "portrait", tmp_path / "x.svg", plane="qq")


# ---------------------------------------------------------------- CLI exit codes


def test_cli_hopf_success(capsys):
    rc = run_cli(["hopf", "--a", "0.129", "--b", "7", "--alpha", "0.99",
                  "--branch", "minus"])
    assert rc == 0
    out = capsys.readouterr().out
    block = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert block["branch"] == "minus"
    assert float(block["gamma_H"]) == pytest.approx(2.6481382407921696, rel=1e-9)
    assert float(block["epsilon_H"]) == pytest.approx(0.5325901791158744, rel=1e-9)
    assert abs(float(block["residual_re"])) < 1e-8


def test_cli_hopf_incommensurate(capsys):
    rc = run_cli(["hopf", "--a", "0.129", "--b", "7", "--alphas", "1,99/100,1"])
    assert rc == 0
    out = capsys.readouterr().out
    block = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert float(block["gamma_H"]) == pytest.approx(1.009826644716634, rel=1e-9)
    assert block["reduction"] == "M:100,p:100,q:99,m:100"


def test_cli_hopf_domain_error_exit_1(capsys):
    rc = run_cli(["hopf", "--a", "0.129", "--b", "7", "--alpha", "0.6667"])
    assert rc == 1
    assert "SingularAngle" in capsys.readouterr().err


def test_cli_usage_error_exit_2(capsys):
    # missing required --alpha/--alphas
    rc = run_cli(["hopf", "--a", "0.129", "--b", "7"])
    assert rc == 2
    # both given at once
    rc = run_cli(["hopf", "--a", "0.1", "--b", "7", "--alpha", "0.9",
                  "--alphas", "1,1,1"])
    assert rc == 2
    # unknown subcommand (argparse exits with 2)
    rc = run_cli(["frobnicate"])
    assert rc == 2


def test_cli_simulate_writes_csv(tmp_path, capsys):
    out_dir = tmp_path / "run"
    rc = run_cli([
        "simulate", "--a", "0.129", "--b", "7", "--alpha", "0.95",
        "--eps", "5", "--h", "0.01", "--t-end", "5",
        "--x0=-4.9,0.05,0.05", "--out", str(out_dir),
    ])
    assert rc == 0
    data = output.read_trajectory_csv(out_dir / "trajectory.csv")
    assert data.shape == (501, 4)
    assert data[0, 1] == -4.9


def test_cli_sweep_with_svg_and_lyapunov(tmp_path):
    out_dir = tmp_path / "sweep"
    rc = run_cli([
        "sweep", "--a", "0.129", "--b", "7", "--alpha", "0.91",
        "--eps-min", "4.5", "--eps-max", "5.5", "--n", "3",
        "--h", "0.02", "--t-end", "20", "--x0", "0.1,0,0",
        "--lyapunov", "--svg", "--out", str(out_dir),
    ])
    assert rc == 0
    sweep = read(out_dir / "sweep.csv")
    assert sweep.splitlines()[0] == "epsilon,kind,x_value"
    ly = read(out_dir / "lyapunov.csv").splitlines()
    assert len(ly) == 4
    assert (out_dir / "bifurcation.svg").exists()
    assert 'class="zero-line"' in read(out_dir / "lyapunov.svg")


def test_cli_portrait(tmp_path):
    out_dir = tmp_path / "pp"
    rc = run_cli([
        "portrait", "--a", "0.129", "--b", "7", "--alpha", "0.95",
        "--eps", "5", "--h", "0.01", "--t-end", "5",
        "--x0=-4.9,0.05,0.05", "--plane", "xz", "--out", str(out_dir),
    ])
    assert rc == 0
    assert (out_dir / "portrait_xz.svg").exists()


def test_cli_lyapunov_command(capsys):
    rc = run_cli([
        "lyapunov", "--a", "0.129", "--b", "7", "--alpha", "0.91",
        "--eps", "5", "--h", "0.01", "--t-end", "40",
        "--x0=-4.9,0.05,0.05",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("lyapunov:")
    assert "lambda=(" in out


# ---------------------------------------------------------------- config files


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# hopf settings\n"
        "a = 0.129\n"
        "b = 7\n"
        "alpha = 0.99\n"
        "branch-unused = x\n"
    )
    rc = run_cli(["hopf", "--config", str(cfg)])
    assert rc == 0
    block = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert float(block["gamma_H"]) == pytest.approx(2.6466510066902766, rel=1e-9)


def test_cli_flag_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("a = 0.129\nb = 7\nalpha = 0.98\n")
    rc = run_cli(["hopf", "--config", str(cfg), "--alpha", "0.99"])
    assert rc == 0
    block = dict(
        line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    assert float(block["gamma_H"]) == pytest.approx(2.6466510066902766, rel=1e-9)


def test_config_file_bad_line_exit_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("a 0.129\n")
    rc = run_cli(["hopf", "--config", str(cfg)])
    assert rc == 2


def test_config_missing_file_exit_2(tmp_path):
    rc = run_cli(["hopf", "--config", str(tmp_path / "nope.cfg")])
    assert rc == 2


def test_cli_sweep_reads_grid_from_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "a = 0.129\nb = 7\nalpha = 0.91\n"
        "eps-min = 4.5\neps-max = 5.5\nn = 2\n"
        "h = 0.02\nt-end = 10\nx0 = 0.1,0,0\n"
    )
    out_dir = tmp_path / "out"
    rc = run_cli(["sweep", "--config", str(cfg), "--out", str(out_dir)])
    assert rc == 0
    eps = {line.split(",")[0] for line in read(out_dir / "sweep.csv").splitlines()[1:]}
    assert eps == {"4.5", "5.5"}
