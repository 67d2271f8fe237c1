import csv
import hashlib
import math
from pathlib import Path

import numpy as np
import pytest

from gmp_overbound.experiments import (
    ExperimentConfig,
    exp_k0_sweeps,
    exp_kf_demo,
    exp_psd_curves,
    load_config,
    monte_carlo_validate,
    simulate_gmp,
    write_csv,
    write_manifest,
)
from gmp_overbound.models import GmpSpec, SamplingSpec
from oracles import autocov_coefficients


def read_rows(path: Path) -> list[dict]:
    with open(path) as handle:
        return list(csv.DictReader(handle))


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestCsvIo:
    def test_header_and_determinism(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["a", "b"], [(1, 0.5), (2, 1.0 / 3.0)])
        text = path.read_text()
        assert text.splitlines()[0] == "a,b"
        assert "0.333333333333333" in text
        first = sha256(path)
        write_csv(path, ["a", "b"], [(1, 0.5), (2, 1.0 / 3.0)])
        assert sha256(path) == first

    def test_row_width_validated(self, tmp_path):
        with pytest.raises(ValueError, match="width"):
            write_csv(tmp_path / "t.csv", ["a", "b"], [(1,)])

    def test_manifest_records_version(self, tmp_path):
        path = write_manifest(tmp_path / "m.txt", {"seed": 7})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("version = ")
        assert "seed = 7" in lines


class TestConfigLoader:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "demo.cfg"
        path.write_text(
            "[kf_demo]\ntau_min = 5\ntau_max = 50\ndt = 0.5\nhorizon = 200\n"
            "seed = 99\nmc_check_steps = 10, 100\n"
        )
        config = load_config(path, "kf_demo")
        assert config.tau_min == 5.0
        assert config.horizon == 200
        assert config.seed == 99
        assert config.mc_check_steps == (10, 100)

    def test_single_section_fallback(self, tmp_path):
        path = tmp_path / "any.cfg"
        path.write_text("[whatever]\ntau_true = 25\n")
        assert load_config(path, "monte_carlo").tau_true == 25.0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[kf_demo]\nbogus_knob = 1\n")
        with pytest.raises(ValueError, match="bogus_knob"):
            load_config(path, "kf_demo")

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            load_config(tmp_path / "nope.cfg", "kf_demo")


@pytest.fixture(scope="module")
def psd_outdir(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("psd")
    exp_psd_curves(ExperimentConfig(experiment="psd_curves", outdir=outdir, freq_count=400))
    return outdir


class TestPsdCurves:
    def test_files_and_schema(self, psd_outdir):
        rows = read_rows(psd_outdir / "psd_cont.csv")
        assert set(rows[0]) == {"frequency_hz", "model", "psd"}
        assert (psd_outdir / "psd_disc.csv").exists()
        assert (psd_outdir / "psd_curves_manifest.txt").exists()

    def test_bound_peak_value(self, psd_outdir):
        # 2 k sigma2 tau_hat = 2 tau_max at the low-frequency end
        rows = [r for r in read_rows(psd_outdir / "psd_cont.csv") if r["model"] == "bound-continuous"]
        first = min(rows, key=lambda r: float(r["frequency_hz"]))
        assert float(first["psd"]) == pytest.approx(200.0, rel=1e-3)

    def test_bound_dominates_each_truth_curve(self, psd_outdir):
        rows = read_rows(psd_outdir / "psd_disc.csv")
        by_model: dict[str, list[float]] = {}
        for row in rows:
            by_model.setdefault(row["model"], []).append(float(row["psd"]))
        bound = np.array(by_model["bound-discrete"])
        for model, values in by_model.items():
            if model.startswith("tau="):
                assert np.all(np.array(values) <= bound * (1.0 + 1e-9)), model

    def test_zero_variance_emits_zero_rows(self, tmp_path):
        outdir = tmp_path / "zero"
        exp_psd_curves(
            ExperimentConfig(experiment="psd_curves", outdir=outdir, sigma2=0.0, freq_count=50)
        )
        assert all(float(r["psd"]) == 0.0 for r in read_rows(outdir / "psd_cont.csv"))


@pytest.fixture(scope="module")
def k0_outdir(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("k0")
    exp_k0_sweeps(ExperimentConfig(experiment="k0_sweeps", outdir=outdir))
    return outdir


class TestK0Sweeps:
    def test_schema(self, k0_outdir):
        rows = read_rows(k0_outdir / "k0_vs_p.csv")
        assert set(rows[0]) == {"p", "tau_s", "k0_required"}
        rows = read_rows(k0_outdir / "k0_vs_dt.csv")
        assert set(rows[0]) == {"dt_s", "interval", "k0_min"}

    def test_sweep_max_at_binding_point(self, k0_outdir):
        rows = read_rows(k0_outdir / "k0_vs_p.csv")
        best = max(rows, key=lambda r: float(r["k0_required"]))
        assert int(best["p"]) == 1
        assert float(best["tau_s"]) == pytest.approx(10.0)
        assert float(best["k0_required"]) == pytest.approx(1.5160422268, abs=1e-6)

    def test_k0_nonincreasing_in_dt(self, k0_outdir):
        rows = [r for r in read_rows(k0_outdir / "k0_vs_dt.csv") if r["interval"] == "[10..100]"]
        rows.sort(key=lambda r: float(r["dt_s"]))
        values = np.array([float(r["k0_min"]) for r in rows])
        assert np.all(np.diff(values) <= 1e-12)


@pytest.fixture(scope="module")
def kf_outdir(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("kf")
    exp_kf_demo(ExperimentConfig(experiment="kf_demo", outdir=outdir, horizon=400))
    return outdir


class TestKfDemo:
    def test_schema(self, kf_outdir):
        rows = read_rows(kf_outdir / "kf_diff.csv")
        assert set(rows[0]) == {
            "step",
            "time_s",
            "model",
            "predicted_sigma_pos",
            "true_sigma_pos",
            "diff",
        }

    def test_diff_file_has_bound_models_only(self, kf_outdir):
        models = {r["model"] for r in read_rows(kf_outdir / "kf_diff.csv")}
        assert models == {"stationary-continuous", "stationary-discrete", "non-stationary"}
        abs_models = {r["model"] for r in read_rows(kf_outdir / "kf_abs.csv")}
        assert "oracle" in abs_models

    def test_all_diffs_nonnegative(self, kf_outdir):
        assert all(float(r["diff"]) >= 0.0 for r in read_rows(kf_outdir / "kf_diff.csv"))

    def test_determinism(self, tmp_path):
        from dataclasses import replace

        config = ExperimentConfig(experiment="kf_demo", horizon=50)
        paths = {}
        for name in ("a", "b"):
            out = tmp_path / name
            exp_kf_demo(replace(config, outdir=out))
            paths[name] = sha256(out / "kf_diff.csv")
        assert paths["a"] == paths["b"]


class TestSimulateGmp:
    def test_deterministic_given_seed(self):
        spec = GmpSpec(1.0, 10.0)
        a = simulate_gmp(spec, 1.0, SamplingSpec(1.0), 20, seed=7, count=5)
        b = simulate_gmp(spec, 1.0, SamplingSpec(1.0), 20, seed=7, count=5)
        for ra, rb in zip(a, b):
            np.testing.assert_array_equal(ra.samples, rb.samples)
        c = simulate_gmp(spec, 1.0, SamplingSpec(1.0), 20, seed=8, count=5)
        assert not np.array_equal(a[0].samples, c[0].samples)

    def test_zero_initial_variance(self):
        spec = GmpSpec(1.0, 10.0)
        for realization in simulate_gmp(spec, 0.0, SamplingSpec(1.0), 5, seed=1, count=10):
            assert realization.samples[0] == 0.0

    def test_realization_length(self):
        spec = GmpSpec(1.0, 10.0)
        realizations = simulate_gmp(spec, 1.0, SamplingSpec(1.0), 12, seed=3, count=4)
        assert len(realizations) == 4
        assert all(r.samples.shape == (13,) for r in realizations)

    def test_stationary_lag2_moment(self):
        # alpha = 0.5: stationary autocovariance at lag 2 is sigma2/4
        dt = 1.0
        tau = -dt / math.log(0.5)
        spec = GmpSpec(1.0, tau)
        realizations = simulate_gmp(spec, 1.0, SamplingSpec(dt), 2, seed=11, count=20000)
        samples = np.array([r.samples for r in realizations])
        products = samples[:, 0] * samples[:, 2]
        se = products.std(ddof=1) / math.sqrt(len(products))
        assert abs(products.mean() - 0.25) <= 3.0 * se

    def test_nonstationary_cross_moment(self):
        # frozen oracle value 0.3125 at (n=1, p=3), sigma0^2 = 2, alpha = 0.5
        expected = autocov_coefficients(1, 3, 2.0, 1.0, 0.5)
        assert expected == 0.3125
        dt = 1.0
        tau = -dt / math.log(0.5)
        spec = GmpSpec(1.0, tau)
        realizations = simulate_gmp(spec, 2.0, SamplingSpec(dt), 3, seed=13, count=20000)
        samples = np.array([r.samples for r in realizations])
        products = samples[:, 1] * samples[:, 3]
        se = products.std(ddof=1) / math.sqrt(len(products))
        assert abs(products.mean() - expected) <= 3.0 * se

    def test_input_validation(self):
        spec = GmpSpec(1.0, 10.0)
        with pytest.raises(ValueError, match="count"):
            simulate_gmp(spec, 1.0, SamplingSpec(1.0), 5, seed=1, count=0)
        with pytest.raises(ValueError, match="sigma0_2"):
            simulate_gmp(spec, -1.0, SamplingSpec(1.0), 5, seed=1, count=1)


class TestMonteCarloValidate:
    def test_rejects_small_count(self):
        with pytest.raises(ValueError, match="count"):
            monte_carlo_validate(
                ExperimentConfig(experiment="monte_carlo", count=100, horizon=10)
            )

    def test_zero_noise_deterministic(self):
        # no randomness anywhere: bands have width zero and everything matches
        config = ExperimentConfig(
            experiment="monte_carlo",
            sigma2=0.0,
            sigma_nu2=0.0,
            design_sigma_nu2=1.0,
            prior_p=0.0,
            prior_v=0.0,
            count=10000,
            horizon=30,
            mc_check_steps=(10, 30),
            mc_lags=(0, 1, 2),
        )
        report = monte_carlo_validate(config)
        assert report.passed
        for row in report.rows:
            assert row.analytic == 0.0
            assert row.empirical == 0.0
            assert row.std_error == 0.0

    def test_truth_matched_design(self):
        # consistent filter: ensemble variance matches the design covariance
        config = ExperimentConfig(
            experiment="monte_carlo",
            mc_design="oracle",
            count=10000,
            horizon=60,
            mc_check_steps=(10, 60),
            mc_lags=(0, 1, 5),
            seed=5,
        )
        report = monte_carlo_validate(config)
        assert report.passed, report.to_text()

    def test_report_text(self):
        config = ExperimentConfig(
            experiment="monte_carlo",
            count=10000,
            horizon=30,
            mc_check_steps=(10, 30),
            mc_lags=(0, 1),
            seed=3,
        )
        report = monte_carlo_validate(config)
        text = report.to_text()
        assert "autocov" in text and "kf_pos_var" in text
        assert report.passed
