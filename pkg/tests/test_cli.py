"""End-to-end tests of the command-line interface.

All tests call main(argv) in-process and assert on exit codes and output.
"""

import io

import pytest

from pandensity.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- tune ------------------------------------------------------------------------

def test_tune(capsys):
    code, out, _ = run(capsys, "tune", "--eps", "0.5")
    assert code == 0
    assert "dwork" in out and "optbern" in out
    assert "p_init=0.5 " in out and "p_upd=0.625" in out
    assert "eps_actual=0.5" in out  # tanh pair spends the whole budget


def test_tune_rejects_out_of_regime(capsys):
    code, _, err = run(capsys, "tune", "--eps", "0.7")
    assert code == 1 and "error" in err


# -- gen + estimate -----------------------------------------------------------------

def test_gen_then_estimate(capsys, tmp_path):
    stream = tmp_path / "s.txt"
    code, out, err = run(
        capsys, "gen", "--dist", "uniform", "--universe", "500",
        "--length", "1000", "--seed", "7", "--out", str(stream),
    )
    assert code == 0 and str(stream) in out and err == ""
    for variant in ("dwork", "optbern", "ppds"):
        code, out, _ = run(
            capsys, "estimate", "--variant", variant, "--universe", "500",
            "--sample", "50", "--eps", "0.3", "--seed", "1", "--input", str(stream),
        )
        assert code == 0
        float(out.strip())  # a bare number


def test_gen_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        run(capsys, "gen", "--dist", "zipf", "--universe", "100",
            "--length", "200", "--seed", "3", "--out", str(path))
    assert a.read_bytes() == b.read_bytes()


def test_gen_entropy_seed_echoed(capsys, tmp_path):
    code, _, err = run(capsys, "gen", "--dist", "uniform", "--universe", "10",
                       "--length", "10", "--out", str(tmp_path / "s.txt"))
    assert code == 0
    assert "seed:" in err


def test_estimate_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("1\n2\n3\n"))
    code, out, _ = run(capsys, "estimate", "--variant", "optbern",
                       "--universe", "10", "--sample", "5", "--eps", "0.5",
                       "--seed", "2")
    assert code == 0
    float(out.strip())


def test_estimate_same_seed_same_output(capsys, tmp_path):
    stream = tmp_path / "s.txt"
    stream.write_text("1\n2\n3\n4\n")
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "estimate", "--variant", "dwork",
                           "--universe", "10", "--sample", "5", "--eps", "0.5",
                           "--seed", "11", "--input", str(stream))
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_estimate_handles_deletions(capsys, tmp_path):
    stream = tmp_path / "s.txt"
    stream.write_text("1\n2,-1\n3\n")
    code, out, _ = run(capsys, "estimate", "--variant", "dwork",
                       "--universe", "10", "--sample", "5", "--eps", "0.5",
                       "--seed", "1", "--input", str(stream))
    assert code == 0
    code, _, err = run(capsys, "estimate", "--variant", "ppds",
                       "--universe", "10", "--sample", "5", "--eps", "0.5",
                       "--seed", "1", "--input", str(stream))
    assert code == 1 and "insert-only" in err


def test_estimate_bad_stream_file(capsys, tmp_path):
    stream = tmp_path / "s.txt"
    stream.write_text("0\n")
    code, _, err = run(capsys, "estimate", "--variant", "dwork",
                       "--universe", "10", "--sample", "5", "--eps", "0.5",
                       "--seed", "1", "--input", str(stream))
    assert code == 1 and "line 1" in err


def test_estimate_missing_file_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "estimate", "--variant", "dwork",
                       "--universe", "10", "--sample", "5", "--eps", "0.5",
                       "--seed", "1", "--input", str(tmp_path / "nope.txt"))
    assert code == 2 and "I/O" in err


# -- bounds -----------------------------------------------------------------------

def test_bounds_beta(capsys):
    code, out, _ = run(capsys, "bounds", "beta", "--variant", "optbern",
                       "--eps", "0.2", "--alpha", "0.1", "--sample", "5000")
    assert code == 0
    assert "beta*=" in out and "delta1=" in out


def test_bounds_msize(capsys):
    code, out, _ = run(capsys, "bounds", "msize", "--variant", "dwork",
                       "--eps", "0.2", "--alpha", "0.1", "--beta", "0.1")
    assert code == 0
    assert "m*=" in out and "delta4=" in out


def test_bounds_mse(capsys):
    code, out, _ = run(capsys, "bounds", "mse", "--variant", "dwork",
                       "--eps", "0.5", "--sample", "1")
    assert code == 0 and "mse_bound=24" in out
    code, out, _ = run(capsys, "bounds", "mse", "--variant", "ppds",
                       "--eps", "0.2", "--level", "3", "--universe", "10000")
    assert code == 0 and "mse_bound=" in out


def test_bounds_mse_missing_args(capsys):
    code, _, err = run(capsys, "bounds", "mse", "--variant", "ppds", "--eps", "0.2")
    assert code == 1 and "level" in err
    code, _, err = run(capsys, "bounds", "mse", "--variant", "dwork", "--eps", "0.2")
    assert code == 1 and "sample" in err


# -- experiment ----------------------------------------------------------------------

def test_experiment_end_to_end(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "variants=dwork,optbern,ppds\ndist=uniform\nuniverse=400\nlength=400\n"
        "eps=0.1,0.2\nsamples=40\nalpha=0.1\nreps=3\nseed=5\nout=res.csv\n"
        "figures=on\n"
    )
    code, out, _ = run(capsys, "experiment", "--config", str(cfg))
    assert code == 0
    csv_lines = (tmp_path / "res.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "variant,eps,m,alpha,reps,err_prob,mse,bias,mse_bound"
    assert len(csv_lines) == 1 + 3 * 2 * 1
    assert (tmp_path / "res_errprob_m40.png").exists()
    assert (tmp_path / "res_mse_m40.png").exists()
    assert "res.csv" in out


def test_experiment_bad_config(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("variants=dwork\n")
    code, _, err = run(capsys, "experiment", "--config", str(cfg))
    assert code == 1


def test_experiment_missing_config_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "experiment", "--config", str(tmp_path / "nope.cfg"))
    assert code == 2


# -- usage errors -----------------------------------------------------------------------

def test_unknown_variant_exits_one(capsys):
    code, _, err = run(capsys, "estimate", "--variant", "magic",
                       "--universe", "10", "--sample", "5", "--eps", "0.5")
    assert code == 1


def test_missing_required_flag_exits_one(capsys):
    code, _, _ = run(capsys, "bounds", "beta", "--variant", "dwork",
                     "--eps", "0.2", "--alpha", "0.1")
    assert code == 1


def test_io_error_on_unwritable_output(capsys, tmp_path):
    code, _, err = run(capsys, "gen", "--dist", "uniform", "--universe", "10",
                       "--length", "10", "--seed", "1",
                       "--out", str(tmp_path / "no" / "dir" / "s.txt"))
    assert code == 2
