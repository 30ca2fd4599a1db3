import numpy as np
import pytest
from scipy.integrate import quad

import whittleboot as wb
from whittleboot.errors import InvalidInputError

from conftest import ar1_series


def direct_objective(theta, spec, fam, grid):
    """Direct-summation oracle for the frequency-domain objective over G_n."""
    total = 0.0
    for j in range(1, grid.N + 1):
        lam = np.array([2 * np.pi * j / grid.n])
        fj = float(fam.f(theta, lam)[0])
        total += 2 * (np.log(fj) + spec[j - 1] / fj)
    return total / grid.n


class TestObjective:
    def test_white_noise_analytic_minimum(self):
        rng = np.random.default_rng(0)
        grid = wb.fourier_grid(100)
        spec = rng.uniform(0.5, 2.0, grid.N)
        fam = wb.WhiteNoiseFamily()
        est = wb.minimize_whittle(fam, spec, grid)
        np.testing.assert_allclose(est.theta[0], 2 * np.pi * spec.mean(), rtol=1e-6)

    def test_self_consistency_ar1(self):
        fam = wb.ARFamily(1)
        theta_star = np.array([2.0, 0.5])
        grid = wb.fourier_grid(256)
        spec = fam.f(theta_star, grid.lam_pos)
        est = wb.minimize_whittle(fam, spec, grid)
        assert est.converged
        np.testing.assert_allclose(est.theta, theta_star, atol=1e-4)

    def test_direct_sum_oracle(self):
        fam = wb.ARFamily(1)
        grid = wb.fourier_grid(10)
        theta = np.array([2 * np.pi, 0.0])
        spec = np.ones(grid.N)
        val = wb.whittle_objective(theta, spec, fam, grid)
        np.testing.assert_allclose(val, direct_objective(theta, spec, fam, grid), rtol=1e-12)

    def test_invalid_theta_rejected(self):
        fam = wb.ARFamily(1)
        grid = wb.fourier_grid(16)
        with pytest.raises(InvalidInputError):
            wb.whittle_objective(np.array([1.0, 1.4]), np.ones(grid.N), fam, grid)


class TestScoreAndHessian:
    def test_first_order_condition(self):
        ts = ar1_series(512, seed=21)
        pg = wb.periodogram(ts)
        fam = wb.ARFamily(1)
        est = wb.minimize_whittle(fam, pg, pg.grid)
        assert est.converged
        score = wb.whittle_score(est.theta, pg, fam, pg.grid)
        assert np.linalg.norm(score) <= 1e-6 * (1 + np.linalg.norm(est.theta))

    def test_gradient_matches_finite_differences(self):
        fam = wb.ARFamily(2)
        grid = wb.fourier_grid(64)
        rng = np.random.default_rng(22)
        spec = rng.uniform(0.2, 1.5, grid.N)
        theta = np.array([1.1, 0.4, -0.2])
        score = wb.whittle_score(theta, spec, fam, grid)
        eps = 1e-6
        for i in range(3):
            up, dn = theta.copy(), theta.copy()
            up[i] += eps
            dn[i] -= eps
            fd = (
                wb.whittle_objective(up, spec, fam, grid)
                - wb.whittle_objective(dn, spec, fam, grid)
            ) / (2 * eps)
            np.testing.assert_allclose(score[i], fd, rtol=1e-5, atol=1e-9)

    def test_hessian_matches_finite_differences(self):
        fam = wb.WhiteNoiseFamily()
        grid = wb.fourier_grid(64)
        rng = np.random.default_rng(23)
        spec = rng.uniform(0.2, 1.5, grid.N)
        est = wb.minimize_whittle(fam, spec, grid)
        theta = est.theta
        hess = wb.whittle_hessian(theta, spec, fam, grid)
        eps = 1e-5
        fd = (
            wb.whittle_score(theta + eps, spec, fam, grid)
            - wb.whittle_score(theta - eps, spec, fam, grid)
        ) / (2 * eps)
        np.testing.assert_allclose(hess[0, 0], fd[0], rtol=1e-5)
        # analytic value at the profiled optimum: 1/sigma^4 * (2N/n)
        np.testing.assert_allclose(
            hess[0, 0], (2 * grid.N / grid.n) / theta[0] ** 2, rtol=1e-8
        )


class TestMinimizer:
    def test_matches_ar1_ratio_up_to_grid_effect(self):
        # the closed-form ratio solves the data-fit part alone; the full
        # objective's log-term (zero frequency excluded from G_n) pulls the
        # minimizer away by O(1/n), vanishing as n grows
        gaps = []
        for n in (1000, 4000):
            ts = ar1_series(n, seed=24)
            pg = wb.periodogram(ts)
            fam = wb.ARFamily(1)
            est = wb.minimize_whittle(fam, pg, pg.grid)
            gaps.append(abs(est.theta[1] - wb.ar1_closed_form(pg)))
        assert gaps[0] < 5e-3
        assert gaps[1] < gaps[0] / 2.5

    def test_recovers_from_all_starts(self):
        fam = wb.ARFamily(1)
        theta_star = np.array([0.8, -0.6])
        grid = wb.fourier_grid(128)
        spec = fam.f(theta_star, grid.lam_pos)
        for init in (np.array([1.0, 0.0]), np.array([5.0, 0.9]), None):
            est = wb.minimize_whittle(fam, spec, grid, theta_init=init)
            np.testing.assert_allclose(est.theta, theta_star, atol=1e-4)

    def test_white_noise(self):
        grid = wb.fourier_grid(64)
        spec = np.full(grid.N, 0.4)
        est = wb.minimize_whittle(wb.WhiteNoiseFamily(), spec, grid)
        np.testing.assert_allclose(est.theta[0], 2 * np.pi * 0.4, rtol=1e-8)

    def test_invalid_start_rejected(self):
        fam = wb.ARFamily(1)
        grid = wb.fourier_grid(16)
        with pytest.raises(InvalidInputError):
            wb.minimize_whittle(fam, np.ones(grid.N), grid, theta_init=np.array([1.0, 1.2]))


class TestAr1ClosedForm:
    def test_mass_at_quarter_frequency(self):
        n = 32
        grid = wb.fourier_grid(n)
        spec = np.zeros(grid.N)
        spec[n // 4 - 1] = 1.0  # lam = pi/2
        pg = wb.Periodogram(grid, spec)
        assert abs(wb.ar1_closed_form(pg)) < 1e-15

    def test_mass_collapses_to_cosine(self):
        n = 32
        grid = wb.fourier_grid(n)
        for j in (3, 9, 14):
            spec = np.zeros(grid.N)
            spec[j - 1] = 2.5
            pg = wb.Periodogram(grid, spec)
            np.testing.assert_allclose(
                wb.ar1_closed_form(pg), np.cos(2 * np.pi * j / n), rtol=1e-12
            )

    def test_zero_mass_rejected(self):
        grid = wb.fourier_grid(16)
        with pytest.raises(InvalidInputError):
            wb.ar1_closed_form(wb.Periodogram(grid, np.zeros(grid.N)))

    def test_model1_concentration(self):
        hits = 0
        for r in range(200):
            pg = wb.periodogram(ar1_series(1000, seed=4000 + r))
            hits += abs(wb.ar1_closed_form(pg) - 0.8) < 0.06
        assert hits >= 190


class TestPseudoTrueParameter:
    def test_self_consistency(self):
        fam = wb.ARFamily(1)
        theta_star = np.array([1.5, 0.7])
        grid = wb.fourier_grid(200)
        est = wb.pseudo_true_parameter(fam, lambda lam: fam.f(theta_star, lam), grid)
        np.testing.assert_allclose(est.theta, theta_star, atol=1e-4)

    def test_white_noise_mean(self):
        grid = wb.fourier_grid(100)
        rng = np.random.default_rng(25)
        fvals = rng.uniform(0.5, 1.5, grid.N)
        est = wb.pseudo_true_parameter(wb.WhiteNoiseFamily(), fvals, grid)
        np.testing.assert_allclose(est.theta[0], 2 * np.pi * fvals.mean(), rtol=1e-7)


class TestScoreVector:
    def test_white_noise_symbolic(self):
        fam = wb.WhiteNoiseFamily()
        theta = np.array([1.7])
        g = wb.score_vector(fam, theta, np.array([0.3, 1.0]))
        np.testing.assert_allclose(g, 1.0 / theta[0] ** 2, rtol=1e-12)

    def test_finite_differences(self):
        fam = wb.ARFamily(1)
        theta = np.array([1.2, 0.55])
        lam = np.array([0.4, 1.3, 2.8])
        g = wb.score_vector(fam, theta, lam)
        eps = 1e-6
        for i in range(2):
            up, dn = theta.copy(), theta.copy()
            up[i] += eps
            dn[i] -= eps
            fd = -(fam.inv_f(up, lam) - fam.inv_f(dn, lam)) / (2 * eps) / (2 * np.pi)
            np.testing.assert_allclose(g[i], fd, rtol=1e-5)

    def test_even_in_frequency(self):
        fam = wb.ARFamily(2)
        theta = np.array([0.8, 0.9, -0.4])
        lam = np.array([0.2, 1.5])
        np.testing.assert_allclose(
            wb.score_vector(fam, theta, lam), wb.score_vector(fam, theta, -lam)
        )


class TestFejerKernel:
    def test_center(self):
        for n in (1, 8, 33):
            assert np.isclose(wb.fejer_kernel(n, 0.0), n / (2 * np.pi))

    def test_unit_mass(self):
        for n in (4, 17):
            val, _ = quad(lambda x: wb.fejer_kernel(n, x), -np.pi, np.pi, limit=400)
            assert abs(val - 1.0) < 1e-6

    def test_order_one_flat(self):
        xs = np.linspace(-3, 3, 25)
        np.testing.assert_allclose(wb.fejer_kernel(1, xs), 1.0 / (2 * np.pi))

    def test_periodicity(self):
        assert np.isclose(wb.fejer_kernel(6, 2 * np.pi), 6 / (2 * np.pi))
        assert np.isclose(wb.fejer_kernel(6, 1.1 + 2 * np.pi), wb.fejer_kernel(6, 1.1))
