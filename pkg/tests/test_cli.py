"""Command line front end: output shape, config handling, exit codes."""

from __future__ import annotations

import subprocess
import sys

import pytest

from postlie.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- trees


def test_trees_enumerate(capsys):
    code, out, err = run(capsys, "trees", "enumerate", "--max-grade", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# postlie command=trees-enumerate")
    assert "count=4" in lines[0]
    assert lines[1:] == ["1", "o", "[o]", "o o"]


def test_trees_enumerate_capacity(capsys):
    code, out, err = run(capsys, "trees", "enumerate", "--max-grade", "9")
    assert code == 2
    assert err.startswith("error:")


# -- algebra


def test_algebra_eval_gl(capsys):
    code, out, _ = run(
        capsys, "algebra", "eval", "--op", "gl", "--left", "o", "--right", "o"
    )
    assert code == 0
    assert out.splitlines()[1:] == ["1 | [o]", "1 | o o"]


def test_algebra_eval_unary(capsys):
    code, out, _ = run(capsys, "algebra", "eval", "--op", "theta", "--left", "[o]")
    assert code == 0
    assert out.splitlines()[1:] == ["-1 | [o]"]


def test_algebra_eval_concat_and_triangle(capsys):
    code, out, _ = run(
        capsys, "algebra", "eval", "--op", "concat", "--left", "[o]", "--right", "o"
    )
    assert out.splitlines()[1:] == ["1 | [o] o"]
    code, out, _ = run(
        capsys, "algebra", "eval", "--op", "triangle", "--left", "o", "--right", "[o]"
    )
    assert out.splitlines()[1:] == ["1 | [[o]]", "1 | [oo]"]


def test_algebra_eval_missing_right(capsys):
    code, out, err = run(capsys, "algebra", "eval", "--op", "gl", "--left", "o")
    assert code == 2
    assert "error:" in err


def test_algebra_eval_parse_error(capsys):
    code, _, err = run(
        capsys, "algebra", "eval", "--op", "gl", "--left", "[o", "--right", "o"
    )
    assert code == 2
    assert "error:" in err


def test_algebra_check_suite(capsys):
    code, out, _ = run(
        capsys,
        "algebra", "check", "--suite", "theta",
        "--max-grade", "2", "--samples", "4", "--seed", "7",
    )
    assert code == 0
    lines = out.splitlines()
    assert "seed=7" in lines[0]
    assert lines[1:]
    assert all("status=pass" in ln for ln in lines[1:])


def test_algebra_check_braiding(capsys):
    code, out, _ = run(
        capsys,
        "algebra", "check", "--suite", "braiding",
        "--max-grade", "2", "--samples", "4",
    )
    assert code == 0
    assert all("status=pass" in ln for ln in out.splitlines()[1:])


def test_algebra_check_unknown_suite(capsys):
    with pytest.raises(SystemExit):
        main(["algebra", "check", "--suite", "nonsense"])


# -- series


def test_series_gl_exp(capsys):
    code, out, _ = run(capsys, "series", "gl-exp", "--order", "2")
    assert code == 0
    body = out.splitlines()[1:]
    assert body[0] == "t^0 | 1 | 1"
    assert "t^2 | 1/2 | [o]" in body


def test_series_modified_field(capsys):
    code, out, _ = run(
        capsys, "series", "modified-field", "--method", "lie-euler", "--order", "2"
    )
    assert code == 0
    assert out.splitlines()[1:] == ["t^1 | 1 | o", "t^2 | -1/2 | [o]"]


def test_series_unknown_method(capsys):
    # Rejected by the argument parser itself.
    with pytest.raises(SystemExit):
        main(["series", "modified-field", "--method", "rk4", "--order", "2"])


# -- experiments


EXP_ARGS = (
    "experiment", "volume",
    "--t-min", "1e-2", "--t-max", "1e-1", "--t-points", "5",
    "--seed", "3",
)


def test_experiment_volume_stdout(capsys):
    code, out, _ = run(capsys, *EXP_ARGS)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# postlie command=experiment-volume")
    assert lines[1] == "t,log_det,abs_err,method,field,seed"
    assert len(lines) == 2 + 5 + 1
    assert lines[-1].startswith("# slope=")


def test_experiment_volume_out_file(capsys, tmp_path):
    target = tmp_path / "vol.csv"
    code, out, _ = run(capsys, *EXP_ARGS, "--out", str(target))
    assert code == 0
    body = target.read_text()
    assert body.splitlines()[0] == "t,log_det,abs_err,method,field,seed"
    # Stdout carries the same table.
    assert body.strip().splitlines()[1] in out


def test_experiment_thread_determinism(capsys, tmp_path):
    f1, f8 = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, *EXP_ARGS, "--threads", "1", "--out", str(f1))
    run(capsys, *EXP_ARGS, "--threads", "8", "--out", str(f8))
    assert f1.read_bytes() == f8.read_bytes()


def test_experiment_rerun_determinism(capsys):
    _, out1, _ = run(capsys, *EXP_ARGS)
    _, out2, _ = run(capsys, *EXP_ARGS)
    assert out1 == out2


def test_experiment_validates_grid(capsys):
    code, _, err = run(
        capsys,
        "experiment", "volume",
        "--t-min", "1e-2", "--t-max", "1e-1", "--t-points", "3",
    )
    assert code == 2
    assert "error:" in err


def test_experiment_order_kind(capsys):
    code, out, _ = run(
        capsys,
        "experiment", "order",
        "--t-min", "2e-3", "--t-max", "2e-2", "--t-points", "5",
    )
    assert code == 0
    assert out.splitlines()[1] == "t,log_det,abs_err,method,field,seed"


# -- config files


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nmax-grade = 1\nseed = 5\n")
    code, out, _ = run(
        capsys, "trees", "enumerate", "--config", str(cfg), "--max-grade", "2"
    )
    assert code == 0
    lines = out.splitlines()
    # Flag beats config for max-grade; seed comes from the file.
    assert "count=4" in lines[0]
    assert "seed=5" in lines[0]


def test_config_file_alone(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("max-grade = 1\n")
    code, out, _ = run(capsys, "trees", "enumerate", "--config", str(cfg))
    assert "count=2" in out.splitlines()[0]


def test_config_file_malformed(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("max-grade\n")
    code, _, err = run(capsys, "trees", "enumerate", "--config", str(cfg))
    assert code == 2
    assert "error:" in err


def test_config_file_missing(capsys, tmp_path):
    code, _, err = run(
        capsys, "trees", "enumerate", "--config", str(tmp_path / "nope.cfg")
    )
    assert code == 2


# -- installed entry point


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "postlie.cli", "trees", "enumerate", "--max-grade", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1:] == ["1", "o"]
