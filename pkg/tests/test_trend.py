import math

import numpy as np
import pytest

from lexshift.errors import (
    DegenerateDesignError,
    InsufficientDataError,
    NonStationaryError,
    SingularDesignError,
)
from lexshift.indices import IndexPoint, IndexSeries
from lexshift.trend import (
    durbin_watson,
    fit_trend,
    gls_ar1_fit,
    hc3_standardized,
    ols_fit,
)

from oracles import brute_durbin_watson, brute_hc3_cov, normal_equation_line, simulate_ar1


def _design(x):
    x = np.asarray(x, dtype=float)
    return np.column_stack([np.ones(x.size), x])


def _series(years, values):
    points = tuple(IndexPoint(y, v, 1) for y, v in zip(years, values))
    return IndexSeries("t", "salience", points, (0.0, 1.0))


class TestOlsFit:
    def test_exact_line(self):
        fit = ols_fit([1.0, 2.0, 3.0], _design([1, 2, 3]))
        assert fit.coefficients["year"].b == pytest.approx(1.0, abs=1e-12)
        assert fit.coefficients["intercept"].b == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.abs(fit.residuals) < 1e-12)

    def test_constant_y(self):
        fit = ols_fit([2.5] * 6, _design(range(6)))
        assert fit.coefficients["year"].b == pytest.approx(0.0, abs=1e-12)
        assert fit.f_stat == pytest.approx(0.0, abs=1e-9)

    def test_normal_equation_fixture(self):
        y = [2.1, 3.9, 6.2, 7.8]
        x = [1.0, 2.0, 3.0, 4.0]
        intercept, slope = normal_equation_line(x, y)
        assert (intercept, slope) == (pytest.approx(0.15), pytest.approx(1.94))
        fit = ols_fit(y, _design(x))
        assert fit.coefficients["year"].b == pytest.approx(slope, abs=1e-10)
        assert fit.coefficients["intercept"].b == pytest.approx(intercept, abs=1e-10)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(5, 40))
            X = _design(rng.normal(size=n))
            y = rng.normal(size=n)
            fit = ols_fit(y, X)
            scale = float(np.abs(y).sum()) or 1.0
            assert np.all(np.abs(X.T @ fit.residuals) < 1e-8 * scale)

    def test_adj_r2_not_above_r2(self):
        rng = np.random.default_rng(32)
        for _ in range(50):
            n = int(rng.integers(5, 30))
            X = _design(rng.normal(size=n))
            y = rng.normal(size=n)
            fit = ols_fit(y, X)
            rss = float(fit.residuals @ fit.residuals)
            tss = float(((y - y.mean()) ** 2).sum())
            r2 = 1 - rss / tss
            assert fit.adj_r2 <= r2 + 1e-12

    def test_singular_design_fatal(self):
        X = np.column_stack([np.ones(5), np.ones(5)])
        with pytest.raises(SingularDesignError) as err:
            ols_fit(np.arange(5.0), X)
        assert err.value.condition_number > 1e10

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            ols_fit([1.0, 2.0], _design([1, 2]))

    def test_p_values_in_range(self):
        rng = np.random.default_rng(33)
        fit = ols_fit(rng.normal(size=20), _design(rng.normal(size=20)))
        for c in fit.coefficients.values():
            assert 0.0 <= c.p <= 1.0


class TestDurbinWatson:
    def test_constant_residuals_zero(self):
        assert durbin_watson([1.0, 1.0, 1.0]).statistic == 0.0

    def test_alternating_exact(self):
        got = durbin_watson([1.0, -1.0, 1.0, -1.0])
        assert got.statistic == 3.0
        assert brute_durbin_watson([1.0, -1.0, 1.0, -1.0]) == 3.0

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(34)
        for _ in range(20):
            e = rng.normal(size=int(rng.integers(3, 50)))
            assert durbin_watson(e).statistic == pytest.approx(
                brute_durbin_watson(e), abs=1e-12
            )

    def test_iid_noise_near_two(self):
        rng = np.random.default_rng(35)
        inside = 0
        trials = 100
        for _ in range(trials):
            d = durbin_watson(rng.normal(size=200), n_permutations=10).statistic
            inside += abs(d - 2.0) <= 0.35
        assert inside >= 95

    def test_positive_autocorrelation_small_p(self):
        rng = np.random.default_rng(36)
        e = simulate_ar1(100, 0.8, 1.0, rng)
        got = durbin_watson(e, seed=1)
        assert got.statistic < 2.0
        assert got.p < 0.01

    def test_p_uniformish_under_null(self):
        rng = np.random.default_rng(37)
        ps = [durbin_watson(rng.normal(size=30), n_permutations=500, seed=2).p for _ in range(200)]
        frac = sum(p < 0.05 for p in ps) / len(ps)
        assert 0.01 <= frac <= 0.10

    def test_perfect_fit_flagged(self):
        got = durbin_watson([0.0, 0.0, 0.0])
        assert got.perfect_fit
        assert got.statistic is None

    def test_deterministic(self):
        e = np.random.default_rng(38).normal(size=40)
        assert durbin_watson(e, seed=5) == durbin_watson(e, seed=5)

    def test_needs_three(self):
        with pytest.raises(InsufficientDataError):
            durbin_watson([1.0, 2.0])


class TestGlsAr1:
    def test_zero_rho_data_equals_ols(self):
        # residuals (1, 0, -2, 0, 1) are orthogonal to the design and have
        # exactly zero lag-1 autocorrelation
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        e = np.array([1.0, 0.0, -2.0, 0.0, 1.0])
        y = 0.7 + 0.3 * x + e
        X = _design(x)
        ols = ols_fit(y, X)
        gls = gls_ar1_fit(y, X)
        assert gls.rho == pytest.approx(0.0, abs=1e-12)
        for term in ("intercept", "year"):
            assert gls.coefficients[term].b == pytest.approx(
                ols.coefficients[term].b, abs=1e-10
            )
            assert gls.coefficients[term].se == pytest.approx(
                ols.coefficients[term].se, abs=1e-10
            )

    def test_explicit_zero_rho(self):
        rng = np.random.default_rng(41)
        x = np.arange(30.0)
        y = rng.normal(size=30)
        X = _design(x)
        ols = ols_fit(y, X)
        gls = gls_ar1_fit(y, X, rho=0.0)
        for term in ("intercept", "year"):
            assert gls.coefficients[term].b == pytest.approx(
                ols.coefficients[term].b, abs=1e-10
            )

    def test_recovers_slope_under_ar1_noise(self):
        rng = np.random.default_rng(42)
        hits = 0
        for _ in range(50):
            t = np.arange(200.0)
            y = 0.5 * t + simulate_ar1(200, 0.7, 1.0, rng)
            fit = gls_ar1_fit(y, _design(t))
            c = fit.coefficients["year"]
            hits += abs(c.b - 0.5) <= 3 * c.se
        assert hits >= 47
        assert 0.4 < fit.rho < 0.95

    def test_nonstationary_rho_fatal(self):
        x = np.arange(10.0)
        with pytest.raises(NonStationaryError):
            gls_ar1_fit(np.sin(x), _design(x), rho=1.0)

    def test_rho_estimate_close(self):
        rng = np.random.default_rng(43)
        t = np.arange(300.0)
        y = simulate_ar1(300, 0.6, 1.0, rng)
        fit = gls_ar1_fit(y, _design(t))
        assert fit.rho == pytest.approx(0.6, abs=0.15)


class TestHc3Standardized:
    def test_simple_regression_beta_is_pearson_r(self):
        rng = np.random.default_rng(51)
        x = rng.normal(size=25)
        y = 2.0 * x + rng.normal(size=25)
        betas = hc3_standardized(y, _design(x))
        r = float(np.corrcoef(x, y)[0, 1])
        assert betas["year"].beta == pytest.approx(r, abs=1e-12)

    def test_perfect_fit_zero_se(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        y = 3.0 + 2.0 * x
        betas = hc3_standardized(y, _design(x))
        assert betas["year"].se_hc3 == pytest.approx(0.0, abs=1e-12)

    def test_matches_bruteforce_sandwich(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        y = np.array([2.1, 3.9, 6.2, 7.8])
        X = _design(x)
        betas = hc3_standardized(y, X)

        ys = (y - y.mean()) / y.std(ddof=1)
        xs = (x - x.mean()) / x.std(ddof=1)
        Xs = _design(xs)
        b, *_ = np.linalg.lstsq(Xs, ys, rcond=None)
        cov = brute_hc3_cov(Xs, ys - Xs @ b)
        assert betas["year"].beta == pytest.approx(b[1], abs=1e-12)
        assert betas["year"].se_hc3 == pytest.approx(math.sqrt(cov[1, 1]), abs=1e-10)
        lo, hi = betas["year"].ci95
        assert lo == pytest.approx(b[1] - 1.96 * math.sqrt(cov[1, 1]), abs=1e-10)
        assert hi == pytest.approx(b[1] + 1.96 * math.sqrt(cov[1, 1]), abs=1e-10)
        assert lo <= hi

    def test_bruteforce_randomized(self):
        rng = np.random.default_rng(52)
        for _ in range(25):
            n = int(rng.integers(6, 30))
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            X = _design(x)
            betas = hc3_standardized(y, X)
            ys = (y - y.mean()) / y.std(ddof=1)
            xs = (x - x.mean()) / x.std(ddof=1)
            Xs = _design(xs)
            b, *_ = np.linalg.lstsq(Xs, ys, rcond=None)
            cov = brute_hc3_cov(Xs, ys - Xs @ b)
            assert betas["year"].se_hc3 == pytest.approx(math.sqrt(cov[1, 1]), abs=1e-10)

    def test_leverage_one_fatal(self):
        X = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        with pytest.raises(DegenerateDesignError):
            hc3_standardized(np.array([1.0, 2.0, 3.0]), X)

    def test_constant_y_zero_betas(self):
        betas = hc3_standardized(np.ones(5), _design(np.arange(5.0)))
        assert betas["year"] .beta == 0.0


class TestFitTrend:
    def test_strictly_linear_series_quadratic_term_null(self):
        years = list(range(1970, 2017))
        values = [0.001 * (y - 1970) + 0.2 for y in years]
        rng = np.random.default_rng(61)
        values = [v + 1e-5 * rng.normal() for v in values]
        fit = fit_trend(_series(years, values), "quadratic")
        q = fit.coefficients["year2"]
        assert abs(q.b) < 1e-6
        assert q.p > 0.05

    def test_symmetric_parabola(self):
        years = list(range(1990, 2001))
        center = sum(years) / len(years)
        values = [0.004 * (y - center) ** 2 for y in years]
        fit = fit_trend(_series(years, values), "quadratic")
        assert fit.center == pytest.approx(center)
        assert fit.coefficients["year"].b == pytest.approx(0.0, abs=1e-12)
        assert fit.coefficients["year2"].b == pytest.approx(0.004, abs=1e-12)

    def test_insufficient_points(self):
        with pytest.raises(InsufficientDataError, match="has 2"):
            fit_trend(_series([1990, 1991], [0.1, 0.2]), "linear")
        with pytest.raises(InsufficientDataError):
            fit_trend(_series([1990, 1991, 1992], [0.1, 0.2, 0.3]), "quadratic")

    def test_estimator_switch_on_autocorrelation(self):
        rng = np.random.default_rng(62)
        years = list(range(1970, 2017))
        noise = simulate_ar1(len(years), 0.85, 1.0, rng)
        fit = fit_trend(_series(years, noise.tolist()), "linear")
        assert fit.dw.p < 0.05
        assert fit.estimator == "gls_ar1"
        assert fit.rho is not None and abs(fit.rho) < 1.0

    def test_white_noise_stays_ols_mostly(self):
        rng = np.random.default_rng(63)
        years = list(range(1970, 2017))
        switched = 0
        for _ in range(100):
            fit = fit_trend(_series(years, rng.normal(size=47).tolist()), "linear")
            switched += fit.estimator == "gls_ar1"
        assert switched <= 15

    def test_std_betas_present_and_bounded_ci(self):
        rng = np.random.default_rng(64)
        years = list(range(1980, 2011))
        fit = fit_trend(_series(years, rng.normal(size=31).tolist()), "linear")
        std = fit.std_betas["year"]
        assert std.ci95[0] <= std.beta <= std.ci95[1]

    def test_trendfit_invariants(self):
        rng = np.random.default_rng(65)
        years = list(range(1970, 2017))
        for _ in range(20):
            fit = fit_trend(_series(years, rng.normal(size=47).tolist()), "linear")
            for c in fit.coefficients.values():
                assert 0.0 <= c.p <= 1.0
            assert 0.0 <= fit.dw.statistic <= 4.0
            assert 0.0 <= fit.dw.p <= 1.0
            if fit.rho is not None:
                assert abs(fit.rho) < 1.0
