import json

import numpy as np
import pytest

from sepvol import checkpoint, cli
from sepvol.config import RunConfig


class Interrupt(Exception):
    pass


def test_estimate_f_smoke(tmp_path, capsys):
    out = tmp_path / "run"
    assert cli.main(["estimate-f", "--points", "1e5", "--extra-mu", "golden", "--out", str(out)]) == 0
    assert (out / "ftable.csv").exists() and (out / "ftable.json").exists()
    meta = json.loads((out / "ftable.json").read_text())
    assert meta["total_points"] == 100_000 and meta["config"]["grid_size"] == 201
    assert "f(1)" in capsys.readouterr().out


def test_resume_is_bitwise_identical(tmp_path):
    base = RunConfig(points=50_000, checkpoint_every=12_000, sequence="scrambled-faure", seed=3)
    whole = base.with_overrides(out=str(tmp_path / "whole"))
    checkpoint.run(whole)

    cut = base.with_overrides(out=str(tmp_path / "cut"))

    def die(acc):
        if acc.total_points >= 24_000:
            raise Interrupt

    with pytest.raises(Interrupt):
        checkpoint.run(cut, on_checkpoint=die)
    assert not (tmp_path / "cut" / "ftable.csv").exists()
    rc = cli.main(["estimate-f", "--points", "50000", "--checkpoint-every", "12000", "--sequence",
                   "scrambled-faure", "--seed", "3", "--out", str(tmp_path / "cut"), "--resume"])
    assert rc == 0
    for name in ("ftable.csv", "ftable.json"):
        a = json.loads((tmp_path / "whole" / name).read_text()) if name.endswith("json") else None
        if a is None:
            assert (tmp_path / "whole" / name).read_bytes() == (tmp_path / "cut" / name).read_bytes()
        else:
            b = json.loads((tmp_path / "cut" / name).read_text())
            a["config"].pop("out"), b["config"].pop("out")
            assert a == b


def test_resume_refuses_other_config(tmp_path):
    out = str(tmp_path / "r")
    checkpoint.run(RunConfig(points=2_000, out=out))
    assert cli.main(["estimate-f", "--points", "4000", "--seed", "9", "--sequence", "scrambled-faure",
                     "--out", out, "--resume"]) == cli.EXIT_INPUT
    (tmp_path / "r" / "checkpoint.json").write_text("{not json")
    assert cli.main(["estimate-f", "--points", "4000", "--out", out, "--resume"]) == cli.EXIT_INPUT


def test_resume_extends_a_finished_run(tmp_path):
    out = str(tmp_path / "r")
    checkpoint.run(RunConfig(points=3_000, out=out))
    grown = checkpoint.run(RunConfig(points=5_000, out=out), resume=True)
    fresh = checkpoint.run(RunConfig(points=5_000, out=str(tmp_path / "f")))
    assert np.array_equal(grown.separable_count, fresh.separable_count)
    with pytest.raises(checkpoint.CheckpointError):
        checkpoint.run(RunConfig(points=1_000, out=out), resume=True)


def test_config_file_with_flag_override(tmp_path):
    RunConfig(points=500, grid_size=11, seed=4, sequence="uniform-prng").save(tmp_path / "c.ini")
    out = tmp_path / "o"
    assert cli.main(["estimate-f", "--config", str(tmp_path / "c.ini"), "--grid", "21", "--out", str(out)]) == 0
    meta = json.loads((out / "ftable.json").read_text())
    assert meta["config"]["grid_size"] == 21 and meta["config"]["seed"] == 4 and meta["total_points"] == 500
    assert cli.main(["estimate-f", "--config", str(tmp_path / "nope.ini")]) == cli.EXIT_INPUT


def test_integrate(tmp_path, capsys):
    out = tmp_path / "run"
    cli.main(["estimate-f", "--points", "1e5", "--out", str(out)])
    capsys.readouterr()
    assert cli.main(["integrate", str(out / "ftable.csv")]) == 0
    text = capsys.readouterr().out
    assert "probability" in text and "reference" in text
    report = json.loads((out / "ftable.report.json").read_text())
    for key in ("case", "v_total_exact", "v_sep", "probability", "split_low", "split_high",
                "points", "grid", "interpolation_degree"):
        assert key in report
    assert 0.44 < report["probability"] < 0.465
    # digest check against flags
    assert cli.main(["integrate", str(out / "ftable.csv"), "--case", "real", "--grid", "201"]) == 0
    assert cli.main(["integrate", str(out / "ftable.csv"), "--seed", "5"]) == cli.EXIT_INPUT


def test_integrate_shows_conjecture_for_complex(tmp_path, capsys):
    out = tmp_path / "c"
    cli.main(["estimate-f", "--case", "complex", "--points", "2e5", "--out", str(out)])
    capsys.readouterr()
    assert cli.main(["integrate", str(out / "ftable.csv")]) == 0
    assert "conjecture" in capsys.readouterr().out


def test_integrate_bad_tables(tmp_path):
    assert cli.main(["integrate", str(tmp_path / "missing.csv")]) == cli.EXIT_INPUT
    out = tmp_path / "run"
    cli.main(["estimate-f", "--points", "1000", "--out", str(out)])
    (out / "ftable.csv").write_text("mu,separable_count,f_estimate\n")
    assert cli.main(["integrate", str(out / "ftable.csv")]) == cli.EXIT_INPUT


def test_jacobian_stable_positive(tmp_path):
    path = tmp_path / "j.csv"
    assert cli.main(["jacobian", "--case", "real", "--grid", "1001", "--out", str(path)]) == 0
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (1001, 2) and np.all(data[:, 1] > 0) and data[-1, 0] == 1.0


def test_jacobian_naive_oscillates(tmp_path):
    path = tmp_path / "j.csv"
    assert cli.main(["jacobian", "--mode", "naive", "--mu-min", "0.95", "--grid", "2001", "--out", str(path)]) == 0
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    near = data[(data[:, 0] > 0.96) & (data[:, 0] < 0.99)]
    assert np.any(near[:, 1] <= 0) and np.all(data[:, 2] > 0)


@pytest.mark.parametrize("args", [["--mu-min", "0"], ["--mu-max", "1.5"], ["--mu-min", "-1"]])
def test_jacobian_domain(args):
    assert cli.main(["jacobian", *args]) == cli.EXIT_INPUT


def test_validate(tmp_path, capsys):
    assert cli.main(["validate", "--out", str(tmp_path / "v.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and all(c["passed"] for c in report["checks"])
    names = {c["name"] for c in report["checks"]}
    assert {"jacobian_integral_real", "jacobian_integral_complex", "total_volume_real",
            "cad_box_vs_density", "fast_vs_slow_path_real"} <= names


def test_validate_catches_corrupted_normalization(capsys):
    assert cli.main(["validate", "--weight-scale", "1.02"]) == cli.EXIT_VALIDATION
    report = json.loads(capsys.readouterr().out)
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    assert failed == ["total_volume_real"]


@pytest.mark.parametrize("argv", [[], ["bogus"], ["estimate-f", "--case", "quaternion"], ["estimate-f", "--points", "x"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == cli.EXIT_USAGE


def test_numerical_errors_map_to_exit_code(monkeypatch):
    def boom(args):
        raise ArithmeticError("quadrature did not converge")

    monkeypatch.setitem(cli._COMMANDS, "jacobian", boom)
    assert cli.main(["jacobian"]) == cli.EXIT_NUMERICAL
