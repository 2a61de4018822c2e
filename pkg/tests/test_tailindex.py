
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailrisk.core import DataError, Level, Series, TailFit
from tailrisk.expectile import laws_expectile
from tailrisk.tailindex import (
    RHO_BOUNDS,
    SecondOrderFit,
    bias_term,
    gamma_expectile_based,
    hill,
    second_order,
)

from conftest import pareto, pareto_gamma_e

SEEDS = range(50)


def burr(n, seed):
    """Burr sample with gamma = 1/2 and rho = -1: survival (1 + x**2)**-1."""
    u = np.random.default_rng(seed).random(n)
    return Series(np.sqrt(1.0 / u - 1.0))


class TestHill:
    def test_log_spaced(self):
        s = Series(np.exp([0.0, 1.0, 2.0, 3.0]))
        fit = hill(s, 3)
        assert fit.gamma == pytest.approx(2.0)
        assert fit.method == "hill"
        assert fit.tau_n.tail == pytest.approx(0.75)

    def test_equal_top_values(self):
        assert hill(Series([0.5, 2.0, 2.0, 2.0]), 2).gamma == 0.0

    def test_nonpositive_threshold(self):
        with pytest.raises(DataError, match="positive upper order statistics"):
            hill(Series([-3.0, -1.0, 0.0, 2.0]), 2)

    @pytest.mark.parametrize("k", [0, 4])
    def test_k_out_of_range(self, k):
        with pytest.raises(DataError):
            hill(Series([1.0, 2.0, 3.0, 4.0]), k)

    def test_pareto_recovery(self):
        gammas = np.array([hill(pareto(0.5, 100_000, s), 1000).gamma for s in SEEDS])
        assert abs(gammas.mean() - 0.5) < 0.01
        assert np.all(np.abs(gammas - 0.5) < 0.05)

    @given(
        st.lists(st.floats(0.01, 1e4), min_size=5, max_size=50),
        st.floats(1e-3, 1e3),
        st.data(),
    )
    def test_scale_invariant(self, xs, c, data):
        s = Series(xs)
        k = data.draw(st.integers(1, s.n - 1))
        assert hill(s.scaled(c), k).gamma == pytest.approx(hill(s, k).gamma, rel=1e-9, abs=1e-12)

    @given(st.lists(st.floats(0.01, 1e4), min_size=5, max_size=50, unique=True), st.data())
    def test_invariant_below_threshold(self, xs, data):
        s = Series(xs)
        k = data.draw(st.integers(1, s.n - 1))
        threshold = s.sorted[s.n - k - 1]
        moved = np.where(s.values < threshold, s.values - 1e3, s.values)
        assert hill(Series(moved), k).gamma == hill(s, k).gamma


class TestExpectileBased:
    def test_ratio_one_gives_half(self):
        s = Series(np.arange(1.0, 11.0))
        fit = gamma_expectile_based(s, Level(0.8), 8.5)
        assert fit.gamma == pytest.approx(0.5)
        assert fit.warning is None

    def test_no_exceedance_gives_one_with_warning(self):
        s = Series(np.arange(1.0, 11.0))
        fit = gamma_expectile_based(s, Level(0.8), 100.0)
        assert fit.gamma == 1.0
        assert fit.warning

    def test_pareto_third(self):
        # at 1 - tau_n = 0.005 the population value is still 0.41, not 1/3:
        # the mean of the law enters the first-order condition at this level
        tau_n = Level.intermediate(500, 100_000)
        est = []
        for seed in SEEDS:
            s = pareto(1 / 3, 100_000, seed)
            est.append(gamma_expectile_based(s, tau_n, laws_expectile(s, tau_n)).gamma)
        assert np.mean(est) == pytest.approx(pareto_gamma_e(1 / 3, tau_n.tail), abs=0.02)

    def test_population_value_tends_to_gamma(self):
        assert pareto_gamma_e(1 / 3, 1e-12) == pytest.approx(1 / 3, abs=1e-4)
        assert pareto_gamma_e(0.5, 1e-12) == pytest.approx(0.5, abs=1e-4)

    def test_both_estimators_converge_on_pareto(self):
        tau_n = Level.intermediate(1000, 100_000)
        h, e = [], []
        for seed in SEEDS:
            s = pareto(1 / 3, 100_000, seed)
            h.append(hill(s, 1000).gamma)
            e.append(gamma_expectile_based(s, tau_n, laws_expectile(s, tau_n)).gamma)
        assert abs(np.mean(h) - 1 / 3) < 0.02
        assert abs(np.mean(e) - pareto_gamma_e(1 / 3, tau_n.tail)) < 0.02

    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40), st.floats(-2e3, 2e3), st.floats(0.5, 0.999))
    def test_range(self, xs, xi, tau):
        g = gamma_expectile_based(Series(xs), Level(tau), xi).gamma
        assert 0.0 < g <= 1.0


class TestSecondOrder:
    def test_pure_pareto_has_negligible_bias(self):
        ratios = []
        for seed in SEEDS:
            s = pareto(0.5, 100_000, seed)
            fit = hill(s, 2000)
            ratios.append(bias_term(fit, second_order(s)) / fit.gamma)
        assert abs(np.mean(ratios)) <= 0.05

    def test_burr_rho(self):
        rhos = [second_order(burr(100_000, seed)).rho_hat for seed in SEEDS]
        assert -2.0 <= np.mean(rhos) <= -0.5

    def test_burr_beta(self):
        betas = [second_order(burr(100_000, seed)).beta_hat for seed in range(10)]
        assert np.mean(betas) == pytest.approx(1.0, abs=0.1)

    def test_clamp(self):
        for seed in range(20):
            so = second_order(pareto(0.5, 2000, seed))
            assert RHO_BOUNDS[0] <= so.rho_hat <= RHO_BOUNDS[1]

    def test_explicit_k(self):
        assert second_order(pareto(0.5, 5000, 0), 2000).k_used == 2000

    def test_too_few(self):
        with pytest.raises(DataError, match="insufficient tail sample"):
            second_order(pareto(0.5, 1000, 0), 49)

    def test_positive_rho_rejected(self):
        with pytest.raises(ValueError):
            SecondOrderFit(0.5, 1.0, 100)


class TestBiasTerm:
    def fit(self, gamma=0.5, tau=0.9):
        return TailFit(gamma, "hill", 100, Level(tau))

    def test_zero_beta(self):
        assert bias_term(self.fit(), SecondOrderFit(-1.0, 0.0, 100)) == 0.0

    def test_arithmetic(self):
        assert bias_term(self.fit(), SecondOrderFit(-1.0, 1.0, 100)) == pytest.approx(0.025)

    def test_clamped_rho_decays(self):
        b = bias_term(self.fit(), SecondOrderFit(-10.0, 1.0, 100))
        assert b == pytest.approx(0.5 * 0.1**10 / 11)
        assert b < bias_term(self.fit(), SecondOrderFit(-1.0, 1.0, 100))

    def test_requires_hill(self):
        with pytest.raises(ValueError):
            bias_term(TailFit(0.5, "expectile_based", 100, Level(0.9)), SecondOrderFit(-1.0, 1.0, 100))
