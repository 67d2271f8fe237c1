import csv
import math

import pytest

from gmp_overbound import __version__
from gmp_overbound.cli import main
from gmp_overbound.models import (
    GmpSpec,
    SamplingSpec,
    TauInterval,
    continuous_bound,
    discrete_bound,
    nonstationary_k0,
    psd_continuous,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_kv(out: str) -> dict:
    pairs = {}
    for line in out.splitlines():
        if ": " in line:
            key, value = line.split(": ", 1)
            pairs[key.strip()] = value.strip()
    return pairs


class TestBoundCommands:
    def test_continuous_human(self, capsys):
        code, out, _ = run(
            capsys, "bound", "continuous", "--tau-min", "10", "--tau-max", "100", "--sigma2", "1"
        )
        assert code == 0
        values = parse_kv(out)
        assert values["tau_hat"] == "31.6228"
        assert values["k"] == "3.16228"
        assert values["sigma_hat2"] == "3.16228"

    def test_continuous_machine_matches_library(self, capsys):
        code, out, _ = run(
            capsys,
            "bound", "continuous", "--tau-min", "10", "--tau-max", "100", "--machine",
        )
        assert code == 0
        values = parse_kv(out)
        bound = continuous_bound(TauInterval(10.0, 100.0), 1.0)
        assert float(values["tau_hat"]) == pytest.approx(bound.tau_hat, rel=1e-14)
        assert float(values["k"]) == pytest.approx(bound.k, rel=1e-14)

    def test_invalid_interval_exit_2(self, capsys):
        code, _, err = run(
            capsys, "bound", "continuous", "--tau-min", "100", "--tau-max", "10"
        )
        assert code == 2
        assert "tau_max" in err

    def test_unparsable_number_exit_2(self, capsys):
        code, _, err = run(capsys, "bound", "continuous", "--tau-min", "abc", "--tau-max", "10")
        assert code == 2

    def test_discrete_matches_library(self, capsys):
        code, out, _ = run(
            capsys,
            "bound", "discrete", "--tau-min", "1", "--tau-max", "10", "--dt", "2", "--machine",
        )
        assert code == 0
        values = parse_kv(out)
        bound = discrete_bound(TauInterval(1.0, 10.0), SamplingSpec(2.0))
        assert float(values["k_d"]) == pytest.approx(bound.k, rel=1e-14)
        assert float(values["tau_hat_d"]) == pytest.approx(bound.tau_hat, rel=1e-14)

    def test_k0_matches_library(self, capsys):
        code, out, _ = run(
            capsys,
            "bound", "k0", "--tau-min", "10", "--tau-max", "100", "--dt", "0.1", "--machine",
        )
        assert code == 0
        interval = TauInterval(10.0, 100.0)
        expected = nonstationary_k0(interval, SamplingSpec(0.1), continuous_bound(interval, 1.0))
        assert float(parse_kv(out)["k0"]) == pytest.approx(expected, rel=1e-14)


class TestPsdCommand:
    def test_continuous_value(self, capsys):
        code, out, _ = run(
            capsys,
            "psd", "--mode", "cont", "--tau", "100", "--sigma2", "1",
            "--omega", "0", "--machine",
        )
        assert code == 0
        expected = psd_continuous(0.0, GmpSpec(1.0, 100.0))
        assert float(parse_kv(out)["psd"]) == pytest.approx(expected, rel=1e-14)

    def test_discrete_requires_dt(self, capsys):
        code, _, err = run(capsys, "psd", "--mode", "disc", "--tau", "10", "--omega", "1")
        assert code == 2
        assert "dt" in err

    def test_csv_output(self, capsys, tmp_path):
        out_file = tmp_path / "psd.csv"
        code, out, _ = run(
            capsys,
            "psd", "--mode", "cont", "--tau", "10",
            "--omega", "0.01", "0.1", "1.0", "--out", str(out_file),
        )
        assert code == 0
        rows = list(csv.DictReader(open(out_file)))
        assert len(rows) == 3
        assert set(rows[0]) == {"omega_rad_s", "psd"}


class TestVerifyCommands:
    def test_dominance_pass(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "dominance", "--mode", "cont", "--tau-min", "10", "--tau-max", "100",
        )
        assert code == 0
        assert "result: PASS" in out

    def test_dominance_fail_reports_worst_point(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "dominance", "--mode", "cont", "--tau-min", "10", "--tau-max", "100",
            "--k", "1", "--tau-hat", "100",
        )
        assert code == 1
        assert "result: FAIL" in out
        assert "argmax_omega" in out and "argmax_tau" in out

    def test_dominance_discrete(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "dominance", "--mode", "disc",
            "--tau-min", "1", "--tau-max", "10", "--dt", "2",
        )
        assert code == 0
        assert "result: PASS" in out

    def test_custom_bound_needs_both_flags(self, capsys):
        code, _, err = run(
            capsys,
            "verify", "dominance", "--mode", "cont", "--tau-min", "10", "--tau-max", "100",
            "--k", "2",
        )
        assert code == 2
        assert "tau-hat" in err or "tau_hat" in err

    def test_acm_pass_and_fail(self, capsys):
        code, out, _ = run(
            capsys,
            "verify", "acm", "--tau-min", "10", "--tau-max", "100", "--dt", "0.1",
            "--n-max", "100",
        )
        assert code == 0
        assert "result: PASS" in out
        interval = TauInterval(10.0, 100.0)
        k0 = nonstationary_k0(interval, SamplingSpec(0.1), continuous_bound(interval, 1.0))
        code, out, _ = run(
            capsys,
            "verify", "acm", "--tau-min", "10", "--tau-max", "100", "--dt", "0.1",
            "--n-max", "100", "--k0", f"{0.99 * k0}",
        )
        assert code == 1
        assert "result: FAIL" in out


class TestDatasetCommands:
    def test_demo_kf_writes_files(self, capsys, tmp_path):
        config = tmp_path / "demo.cfg"
        config.write_text("[kf_demo]\nhorizon = 40\n")
        code, out, _ = run(
            capsys, "demo", "kf", "--config", str(config), "--out", str(tmp_path / "out")
        )
        assert code == 0
        assert (tmp_path / "out" / "kf_diff.csv").exists()
        assert (tmp_path / "out" / "kf_abs.csv").exists()

    def test_env_var_overrides_outdir(self, capsys, tmp_path, monkeypatch):
        config = tmp_path / "demo.cfg"
        config.write_text("[kf_demo]\nhorizon = 10\n")
        env_dir = tmp_path / "from-env"
        monkeypatch.setenv("GMP_OVERBOUND_OUT", str(env_dir))
        code, _, _ = run(
            capsys, "demo", "kf", "--config", str(config), "--out", str(tmp_path / "ignored")
        )
        assert code == 0
        assert (env_dir / "kf_diff.csv").exists()
        assert not (tmp_path / "ignored").exists()

    def test_reproduce_all(self, capsys, tmp_path):
        config = tmp_path / "all.cfg"
        config.write_text("[experiment]\nhorizon = 20\nfreq_count = 50\ndt_grid_count = 5\n")
        code, out, _ = run(
            capsys, "reproduce", "--config", str(config), "--out", str(tmp_path / "out")
        )
        assert code == 0
        for name in (
            "psd_cont.csv", "psd_disc.csv", "k0_vs_p.csv", "k0_vs_dt.csv",
            "kf_diff.csv", "kf_abs.csv",
        ):
            assert (tmp_path / "out" / name).exists(), name

    def test_simulate_gmp_deterministic(self, capsys, tmp_path):
        args = [
            "simulate", "gmp", "--tau", "10", "--sigma2", "1", "--dt", "1",
            "--steps", "5", "--seed", "42", "--count", "3",
        ]
        code, _, _ = run(capsys, *args, "--out", str(tmp_path / "a"))
        assert code == 0
        code, _, _ = run(capsys, *args, "--out", str(tmp_path / "b"))
        assert code == 0
        a = (tmp_path / "a" / "gmp_realizations.csv").read_bytes()
        b = (tmp_path / "b" / "gmp_realizations.csv").read_bytes()
        assert a == b

    def test_validate_mc(self, capsys, tmp_path):
        config = tmp_path / "mc.cfg"
        config.write_text(
            "[monte_carlo]\ncount = 10000\nhorizon = 30\n"
            "mc_check_steps = 10, 30\nmc_lags = 0, 1\nseed = 2\n"
        )
        code, out, _ = run(
            capsys, "validate", "mc", "--config", str(config), "--out", str(tmp_path / "out")
        )
        assert code == 0
        assert "result: PASS" in out
        assert (tmp_path / "out" / "mc_validation.csv").exists()


class TestTopLevel:
    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert __version__ in out

    def test_help_lists_subcommands(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == 0
        for name in ("bound", "psd", "verify", "demo", "simulate", "validate"):
            assert name in out

    def test_unknown_flag_exit_2(self, capsys):
        code, _, _ = run(capsys, "bound", "continuous", "--bogus", "1")
        assert code == 2
