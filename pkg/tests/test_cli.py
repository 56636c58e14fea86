import json
import math
import os

import pytest

from diracbox import cli
from diracbox.errors import ClusterResolutionError


def run(argv):
    return cli.main(argv)


def test_solve_json_record(tmp_path, capsys):
    out = tmp_path / "solve.json"
    rc = run(["solve", "--a", "1", "--b", "1", "--m", "0", "--n", "16",
              "--out", str(out)])
    assert rc == 0
    record = json.loads(out.read_text())
    assert record["bracket_lo"] == pytest.approx(math.pi**2 / 2, rel=1e-13)
    assert record["bracket_lo"] <= record["mu"] <= record["trial_quotient"]
    assert record["lambda1"] == pytest.approx(math.sqrt(record["mu"]), rel=1e-14)
    # stdout carries the same canonical JSON
    assert json.loads(capsys.readouterr().out) == record


def test_solve_cache_byte_identical(tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    base = ["solve", "--a", "1.5", "--b", "0.8", "--m", "1", "--n", "12"]
    assert run(base + ["--out", str(out1)]) == 0
    assert run(base + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    cache_dir = os.environ["DIRACBOX_CACHE_DIR"]
    assert os.listdir(cache_dir)


def test_solve_no_cache_recomputes(tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    base = ["solve", "--a", "1", "--b", "1", "--m", "0", "--n", "12",
            "--no-cache"]
    assert run(base + ["--out", str(out1)]) == 0
    assert run(base + ["--out", str(out2)]) == 0
    rec1 = json.loads(out1.read_text())
    rec2 = json.loads(out2.read_text())
    rec1.pop("wall_time_ms"), rec2.pop("wall_time_ms")
    assert rec1 == rec2


def test_solve_csv_format(tmp_path):
    out = tmp_path / "solve.csv"
    rc = run(["solve", "--a", "1", "--b", "1", "--n", "12", "--format", "csv",
              "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == cli.CSV_HEADER
    assert len(lines) == 2


def test_seventeen_digit_round_trip():
    values = [math.pi, 1 / 3, 6.9090908316917021, 1e-300, 123456.789]
    for v in values:
        assert float(cli.format_number(v)) == v
    with pytest.raises(ValueError):
        cli.format_number(float("nan"))


def test_argument_error_exit_code():
    assert run(["solve", "--n", "7"]) == 2          # odd grid
    assert run(["solve", "--a", "-1", "--n", "8"]) == 2
    with pytest.raises(SystemExit) as exc:
        run(["solve", "--format", "xml"])           # argparse enum
    assert exc.value.code == 2


def test_solver_failure_exit_code():
    assert run(["solve", "--n", "12", "--tol", "1e-30", "--no-cache"]) == 3


def test_symmetry_failure_exit_code(monkeypatch):
    def boom(*args, **kwargs):
        raise ClusterResolutionError("forced")
    monkeypatch.setattr(cli.symmetry_mod, "classify_symmetry", boom)
    assert run(["symmetry", "--a", "1", "--n", "12"]) == 4


def test_consistency_violation_exit_code(monkeypatch):
    monkeypatch.setattr(cli.bounds_mod, "thm_lower",
                        lambda a, b, m: 1e9)
    assert run(["solve", "--n", "12", "--no-cache"]) == 5


def test_sweep_csv_contract(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--constraint", "area", "--m", "0", "--a-min", "0.5",
            "--a-max", "2", "--steps", "5", "--n", "12", "--out", str(out)]
    assert run(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == cli.CSV_HEADER
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 5
    a_values = [float(r[0]) for r in rows]
    assert a_values == sorted(a_values)
    assert "argmin" in capsys.readouterr().out
    # repeat run is byte-identical thanks to the cache
    out2 = tmp_path / "sweep2.csv"
    assert run(argv[:-1] + [str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_sweep_jobs_independent_of_scheduling(tmp_path):
    base = ["sweep", "--constraint", "area", "--m", "0", "--a-min", "0.5",
            "--a-max", "2", "--steps", "4", "--n", "12", "--no-cache"]
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    assert run(base + ["--jobs", "1", "--out", str(serial)]) == 0
    assert run(base + ["--jobs", "2", "--out", str(parallel)]) == 0

    def strip_timing(path):
        rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
        return [r[:11] + r[12:] for r in rows]   # drop wall_time_ms

    assert strip_timing(serial) == strip_timing(parallel)


def test_sweep_validates_range(tmp_path):
    assert run(["sweep", "--constraint", "perimeter", "--a-min", "0.5",
                "--a-max", "2.5", "--steps", "3", "--n", "12",
                "--out", str(tmp_path / "x.csv")]) == 2
    assert run(["sweep", "--constraint", "area", "--a-min", "0.5",
                "--a-max", "2", "--steps", "3", "--n", "12"]) == 2   # no --out


def test_bounds_cmd(tmp_path, capsys):
    assert run(["bounds", "--a", "1.2", "--b", str(1 / 1.2), "--m", "500"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["conditions"]["cond_b"]["holds"]
    assert report["conditions"]["cond_b"]["margin"] == pytest.approx(11.2222,
                                                                     abs=1e-3)
    assert run(["bounds", "--a", "1", "--b", "1", "--m", "0"]) == 0
    square = json.loads(capsys.readouterr().out)
    assert not any(c["holds"] for c in square["conditions"].values())


def test_symmetry_cmd_square(capsys):
    assert run(["symmetry", "--a", "1", "--m", "0", "--n", "12"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "quarter_turn"
    assert report["cluster_size"] >= 1
    for cls in report["classes"]:
        alpha = complex(cls["alpha_re"], cls["alpha_im"])
        assert abs(alpha**4 - 1) <= 1e-6
        assert cls["d1"] <= 1e-6 and cls["d2"] <= 1e-6
    assert report["commutation_check"] <= 1e-12
    assert report["separability"]["component1"] is not None


def test_symmetry_cmd_rectangle(capsys):
    assert run(["symmetry", "--a", "1.5", "--b", str(1 / 1.5), "--m", "0",
                "--n", "12"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "half_turn"
    for cls in report["classes"]:
        alpha = complex(cls["alpha_re"], cls["alpha_im"])
        assert abs(alpha**2 - 1) <= 1e-6


def test_jopt_cmd_deterministic(tmp_path):
    out1, out2 = tmp_path / "j1.json", tmp_path / "j2.json"
    argv = ["jopt", "--m", "0", "--n", "12", "--restarts", "3"]
    assert run(argv + ["--out", str(out1)]) == 0
    assert run(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert {"best_mu", "d1", "d2", "restarts"} <= set(report)
    for restart in report["restarts"]:
        if restart["status"] == "ok":
            mus = [h[0] for h in restart["history"]]
            assert all(b <= a + 1e-12 * max(1.0, abs(a))
                       for a, b in zip(mus, mus[1:]))


def test_refine_cmd(capsys):
    assert run(["refine", "--a", "1", "--b", "1", "--m", "0",
                "--n-list", "8,16,32"]) == 0
    report = json.loads(capsys.readouterr().out)
    mus = [mu for _, mu in report["entries"]]
    assert mus[0] >= mus[1] >= mus[2]
    assert report["extrapolated_lambda1"] == pytest.approx(
        math.sqrt(report["extrapolated_mu"]), rel=1e-14)


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 8\nseed = 5\n# comment\nm = 0\n")
    assert run(["solve", "--config", str(cfg), "--n", "12",
                "--no-cache"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["n"] == 12      # flag wins
    assert record["seed"] == 5    # config beats default
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 3\n")
    assert run(["solve", "--config", str(bad)]) == 2
