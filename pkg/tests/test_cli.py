import json
import math
import subprocess
import sys

import pytest

from trace_moments.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_csv_rows_and_determinism(capsys, tmp_path):
    argv = ["sample", "--n", "4", "--beta", "1", "--samples", "1000", "--seed", "7",
            "--sampler", "tridiagonal", "--format", "csv"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t1,t2" and len(lines) == 1001
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--output", str(a)]) == 0
    assert main(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes() == out.encode()


def test_sample_full_trace_rows(capsys):
    code, out, _ = run(capsys, "sample", "--n", "3", "--beta", "2.5", "--samples", "5",
                       "--seed", "1", "--r-max", "4", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 5 and set(rows[0]) == {"t1", "t2", "t3", "t4"}


def test_seed_from_environment(capsys, monkeypatch):
    base = ["sample", "--n", "3", "--beta", "1", "--samples", "20", "--sampler", "exact"]
    monkeypatch.setenv("TRACE_MOMENTS_SEED", "11")
    _, env_out, _ = run(capsys, *base)
    _, flag_out, _ = run(capsys, *base, "--seed", "11")
    assert env_out == flag_out
    monkeypatch.setenv("TRACE_MOMENTS_SEED", "eleven")
    assert run(capsys, *base)[0] == 2


@pytest.mark.parametrize("argv,name", [
    (["sample", "--n", "4", "--beta", "0"], "NonPositiveBeta"),
    (["sample", "--n", "0", "--beta", "1"], "NonPositiveN"),
    (["sample", "--n", "3", "--beta", "4", "--sampler", "dense"], "UnsupportedBeta"),
    (["density", "--n", "1", "--beta", "1", "--points", "0,1"], "InvalidExponent"),
    (["verify", "--n", "1", "--beta", "1"], "InvalidExponent"),
    (["standardize", "--spectrum", "2,2,2"], "DegenerateScale"),
])
def test_errors_are_named_exit_2(capsys, argv, name):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert name in err and "Traceback" not in err


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--n", "2", "--beta", "1", "--bogus"])
    assert exc.value.code == 2


def test_density_points(capsys):
    code, out, _ = run(capsys, "density", "--n", "2", "--beta", "1", "--points", "0,1;1,0")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t1,t2,log_q"
    val = float(lines[1].split(",")[2])
    assert math.isclose(val, math.log(math.exp(-0.5) / (4 * math.sqrt(math.pi))), rel_tol=1e-14)
    assert lines[2].split(",")[2] == "-inf"


def test_density_grid(capsys):
    code, out, _ = run(capsys, "density", "--n", "3", "--beta", "2", "--grid=-1:1:3,0.5:4:5")
    assert code == 0 and len(out.splitlines()) == 1 + 15
    code, out, _ = run(capsys, "density", "--n", "3", "--beta", "2", "--grid=-1:1:3,0.5:4:5",
                       "--format", "json")
    assert len(json.loads(out)) == 15
    assert run(capsys, "density", "--n", "3", "--beta", "2", "--grid", "x")[0] == 2


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--n", "4", "--beta", "1", "--k", "0", "--nn", "1")
    assert code == 0
    assert float(out.splitlines()[1].split(",")[4]) == 10.0
    code, out, _ = run(capsys, "moments", "--n", "4", "--beta", "1", "--k", "0", "--nn", "0")
    assert float(out.splitlines()[1].split(",")[4]) == 1.0


def test_bounds(capsys, tmp_path):
    code, out, _ = run(capsys, "bounds", "--spectrum", "1,2")
    assert code == 0
    assert all(line.split(",")[3] == "true" for line in out.splitlines()[1:])
    code, out, _ = run(capsys, "bounds", "--n", "2", "--traces", "0,-1")
    assert code == 1 and "t1^2 <= N*t2,0.0,-2.0,false" in out
    code, out, _ = run(capsys, "bounds", "--spectrum", "0.5,0.5,0.5")
    assert code == 0
    assert out.splitlines()[1].endswith("true,true")
    f = tmp_path / "t.txt"
    f.write_text("3 5\n9 17\n")
    assert run(capsys, "bounds", "--n", "2", "--traces-file", str(f))[0] == 0
    assert run(capsys, "bounds", "--traces", "1,2")[0] == 2
    assert run(capsys, "bounds", "--n", "2", "--traces", "1,x")[0] == 2
    assert run(capsys, "bounds", "--n", "2", "--traces-file", str(tmp_path / "none"))[0] == 2


def test_standardize(capsys):
    code, out, _ = run(capsys, "standardize", "--spectrum", "0,1,2")
    assert code == 0
    rows = dict(line.split(",") for line in out.splitlines()[1:])
    assert float(rows["delta"]) == 1.0
    assert math.isclose(float(rows["c"]), math.sqrt(2.0))
    assert abs(float(rows["t1"])) <= 1e-12 and abs(float(rows["t2"]) - 1) <= 1e-12


def test_verify_exact_subset_with_plots(capsys, tmp_path):
    report = tmp_path / "r.json"
    script = tmp_path / "o.gp"
    fig = tmp_path / "o.png"
    code, _, _ = run(capsys, "verify", "--n", "4", "--beta", "1", "--samples", "10000",
                     "--seed", "42", "--sampler", "exact", "--output", str(report),
                     "--plot-script", str(script), "--figure", str(fig), "--threads", "1")
    assert code == 0
    data = json.loads(report.read_text())
    assert all(r["passed"] for r in data)
    assert {r["name"].split(":")[0] for r in data} == {"exact"}
    text = script.read_text()
    assert "$hist0 << EOD" in text and "with boxes" in text
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_verify_failure_exit_code(capsys, monkeypatch):
    from trace_moments import verify
    real = verify.run_campaign

    def rigged(*a, **k):
        reps = real(*a, **k)
        reps[0].passed = False
        return reps

    monkeypatch.setattr(verify, "run_campaign", rigged)
    code, out, err = run(capsys, "verify", "--n", "3", "--beta", "1", "--samples", "1000",
                         "--sampler", "exact", "--format", "csv")
    assert code == 1 and "checks failed" in err
    assert out.startswith("name,statistic")


def test_unknown_sampler_exit_2(capsys):
    assert run(capsys, "verify", "--n", "3", "--beta", "1", "--sampler", "quantum")[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "trace_moments", "moments", "--n", "2",
                          "--beta", "2", "--nn", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[1].split(",")[4] == "2.0"
