import numpy as np
import pytest
from scipy.stats import kurtosis, skew, wasserstein_distance

import whittleboot as wb
from whittleboot.errors import InvalidInputError
from whittleboot.simulation import MODELS, _gaussian_limit_sd


class TestLaplace:
    def test_moments(self):
        rng = np.random.default_rng(0)
        x = wb.laplace_sample(0.1, rng, size=100_000)
        assert abs(x.mean()) < 3 * x.std() / np.sqrt(x.size)
        assert abs(x.var() - 0.02) < 0.05 * 0.02
        assert abs(kurtosis(x) - 3.0) < 0.45

    def test_bad_scale(self):
        with pytest.raises(InvalidInputError):
            wb.laplace_sample(0.0, np.random.default_rng(0))


class TestGenerate:
    def test_model1_autocorrelation(self):
        rng = np.random.default_rng(1)
        ts = wb.generate(MODELS["model1"], 100_000, rng)
        x = ts.values - ts.values.mean()
        rho1 = (x[1:] @ x[:-1]) / (x @ x)
        assert abs(rho1 - 0.8) < 0.01

    def test_model3_positive_drift(self):
        rng = np.random.default_rng(2)
        ts = wb.generate(MODELS["model3"], 100_000, rng)
        assert ts.values.mean() > 0

    def test_model2_stationary_variance(self):
        rng = np.random.default_rng(3)
        ts = wb.generate(MODELS["model2"], 100_000, rng)
        x = ts.values
        v1, v2 = x[: 50_000].var(), x[50_000:].var()
        assert abs(v1 - v2) / max(v1, v2) < 0.2

    def test_minimum_length(self):
        with pytest.raises(InvalidInputError):
            wb.generate(MODELS["model1"], 10, np.random.default_rng(4))

    def test_burn_in_validation(self):
        with pytest.raises(InvalidInputError):
            wb.SimulationModel("model1", burn_in=100)


class TestA0Oracle:
    def test_model1_matches_truth(self):
        assert abs(wb.a0_oracle(MODELS["model1"]) - 0.8) < 0.002

    def test_deterministic(self):
        assert wb.a0_oracle(MODELS["model2"]) == wb.a0_oracle(MODELS["model2"])

    def test_plausible_ranges(self):
        for tag in ("model2", "model3"):
            val = wb.a0_oracle(MODELS[tag])
            assert 0.0 < val < 1.0


class TestPseudoTrueUnderMisspecification:
    def test_model2_centering_matches_autocorrelation(self):
        # the best-fitting AR(1) coefficient equals the lag-one
        # autocorrelation; the data-driven centering parameter tracks it
        model = MODELS["model2"]
        rho1 = wb.a0_oracle(model)
        rng = np.random.default_rng(77)
        ts = wb.generate(model, 2000, rng)
        pg = wb.periodogram(ts)
        fhat = wb.kernel_spectral_estimate(pg, wb.cv_bandwidth(pg))
        est = wb.pseudo_true_parameter(wb.ARFamily(1), fhat(pg.grid.lam_pos), pg.grid)
        assert est.converged
        assert abs(est.theta[1] - rho1) < 0.05


class TestExactDistribution:
    def test_model1_shape(self):
        rng = np.random.default_rng(5)
        vals = wb.exact_distribution(MODELS["model1"], 1000, 2000, rng, a0=0.8)
        # the estimator's O(1/n) bias survives on the sqrt(n) scale, so the
        # mean sits slightly below zero; skewness is negative
        assert abs(vals.mean()) < 0.25
        assert skew(vals) < 0
        sd_target = _gaussian_limit_sd(MODELS["model1"])
        assert abs(vals.std() - sd_target) < 0.10 * sd_target

    def test_single_replicate(self):
        rng = np.random.default_rng(6)
        vals = wb.exact_distribution(MODELS["model1"], 200, 1, rng, a0=0.8)
        assert vals.shape == (1,)

    def test_matches_direct_estimator(self):
        # the batched computation equals the one-series pipeline
        model = MODELS["model1"]
        seed = 7
        vals = wb.exact_distribution(model, 256, 1, np.random.default_rng(seed), a0=0.8)
        ts = wb.generate(model, 256, np.random.default_rng(seed))
        a_hat = wb.ar1_closed_form(wb.periodogram(ts))
        np.testing.assert_allclose(vals[0], np.sqrt(256) * (a_hat - 0.8), rtol=1e-10)


class TestD1Distance:
    def test_identical(self):
        x = np.random.default_rng(8).standard_normal(500)
        assert wb.d1_distance(x, x.copy()) == 0.0

    def test_point_masses(self):
        a = np.zeros(100)
        b = np.full(100, 2.5)
        np.testing.assert_allclose(wb.d1_distance(a, b), 2.5)

    def test_shift_identity(self):
        x = np.random.default_rng(9).standard_normal(400)
        np.testing.assert_allclose(wb.d1_distance(x, x + 0.37), 0.37, atol=1e-12)

    def test_metric_properties(self):
        rng = np.random.default_rng(10)
        x, y, z = (rng.standard_normal(250) for _ in range(3))
        dxy = wb.d1_distance(x, y)
        dyx = wb.d1_distance(y, x)
        assert abs(dxy - dyx) < 1e-12
        assert dxy <= wb.d1_distance(x, z) + wb.d1_distance(z, y) + 1e-12

    def test_scale_equivariance(self):
        rng = np.random.default_rng(11)
        x, y = rng.standard_normal(300), rng.standard_normal(300)
        np.testing.assert_allclose(
            wb.d1_distance(3.5 * x, 3.5 * y), 3.5 * wb.d1_distance(x, y), rtol=1e-12
        )

    def test_matches_quantile_grid_oracle_equal_sizes(self):
        rng = np.random.default_rng(12)
        x, y = rng.standard_normal(400), rng.standard_normal(400) + 0.3
        ours = wb.d1_distance(x, y)
        # left-continuous quantile functions on the midpoint grid (sample
        # sizes divide the grid size, so the grid oracle is exact)
        u = (np.arange(10_000) + 0.5) / 10_000
        xs, ys = np.sort(x), np.sort(y)
        qx = xs[np.ceil(u * 400).astype(int) - 1]
        qy = ys[np.ceil(u * 400).astype(int) - 1]
        assert abs(ours - np.mean(np.abs(qx - qy))) < 1e-10

    def test_matches_scipy_unequal_sizes(self):
        rng = np.random.default_rng(13)
        x, y = rng.standard_normal(300), rng.standard_normal(700) + 0.2
        ours = wb.d1_distance(x, y)
        ref = wasserstein_distance(x, y)
        assert abs(ours - ref) < 5e-3

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            wb.d1_distance([], [1.0])

    def test_normal_comparator(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal(200_000) * 1.7
        assert wb.d1_to_normal(x, 1.7) < 0.02


class TestRunExperiment:
    def test_tiny_run_reproducible_and_complete(self):
        res1 = wb.run_experiment(["model1"], [256], B=100, R=200, mc_reps=3, seed=5)
        res2 = wb.run_experiment(["model1"], [256], B=100, R=200, mc_reps=3, seed=5)
        assert res1.rows == res2.rows
        methods = {row["method"] for row in res1.rows}
        assert methods == {"hybrid", "multiplicative", "gaussian-asymptotic"}
        for row in res1.rows:
            assert row["mean_d1"] >= 0 and np.isfinite(row["se_d1"])

    def test_csv_roundtrip(self, tmp_path):
        res = wb.run_experiment(["model2"], [256], B=100, R=200, mc_reps=2, seed=6)
        path = tmp_path / "results.csv"
        res.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "model,n,b,method,mean_d1,se_d1,reps"
        assert len(lines) == 1 + len(res.rows)

    def test_cell_lookup(self):
        res = wb.run_experiment(["model1"], [256], b_values=[12], B=100, R=200, mc_reps=2, seed=7)
        row = res.cell("model1", 256, 12, "hybrid")
        assert row["reps"] == 2
