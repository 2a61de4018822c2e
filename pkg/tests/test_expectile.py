import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from tailrisk.core import ConvergenceError, DataError, Level, NumericalError, Series, TailFit
from tailrisk.core import empirical_quantile
from tailrisk.expectile import (
    ExpectileConfig,
    ExtrapolationSpec,
    composite_laws,
    composite_laws_via_alpha,
    composite_qb,
    extrapolate,
    foc_residual,
    laws_expectile,
    qb_expectile,
    tau_prime_hat,
    weissman_quantile,
)
from tailrisk.tailindex import hill

from conftest import pareto, pareto_expectile

SEEDS = range(50)
values = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=40)
taus = st.floats(0.01, 0.99)


def brentq_expectile(y, tau):
    """Independent oracle: root of the first-order condition."""
    y = np.asarray(y, dtype=float)
    if y.min() == y.max():
        return float(y[0])

    def g(t):
        return tau * np.clip(y - t, 0, None).sum() - (1 - tau) * np.clip(t - y, 0, None).sum()

    return brentq(g, y.min(), y.max(), xtol=1e-14, rtol=1e-15)


def fit(gamma, k=100, tail=0.1):
    return TailFit(gamma, "hill", k, Level.from_tail(tail))


class TestLaws:
    def test_median_level_is_mean(self):
        s = Series([1.0, 4.0, 2.5, 9.0])
        assert laws_expectile(s, Level(0.5)) == pytest.approx(4.125, rel=1e-14)

    def test_two_point(self):
        assert laws_expectile(Series([0.0, 1.0]), Level(0.8)) == pytest.approx(0.8, rel=1e-12)

    def test_bisection_oracle(self):
        y = [1.0, 2.0, 3.0, 10.0]
        assert laws_expectile(Series(y), Level(0.9)) == pytest.approx(brentq_expectile(y, 0.9), abs=1e-8)

    def test_needs_two_points(self):
        with pytest.raises(DataError):
            laws_expectile(Series([1.0]), Level(0.7))

    def test_non_convergence_carries_state(self):
        s = pareto(0.5, 1000, 0)
        with pytest.raises(ConvergenceError) as info:
            laws_expectile(s, Level(0.999), ExpectileConfig(max_iter=1))
        assert np.isfinite(info.value.last)
        assert info.value.residual > 0

    def test_random_samples_match_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            y = rng.standard_t(3, size=rng.integers(2, 30))
            tau = rng.uniform(0.01, 0.999)
            got = laws_expectile(Series(y), Level(tau))
            assert got == pytest.approx(brentq_expectile(y, tau), abs=1e-8)
            assert foc_residual(y, got, tau) < 1e-9

    @given(values, taus, taus)
    def test_monotone_in_tau(self, xs, t1, t2):
        s = Series(xs)
        lo, hi = sorted((t1, t2))
        a, b = laws_expectile(s, Level(lo)), laws_expectile(s, Level(hi))
        assert a <= b + 1e-9 * max(1.0, abs(b))

    @given(values, taus, st.floats(-100, 100), st.floats(0.01, 100))
    def test_equivariance(self, xs, tau, shift, scale):
        s = Series(xs)
        base = laws_expectile(s, Level(tau))
        span = max(1.0, float(np.ptp(xs)), abs(base))
        assert laws_expectile(Series(np.add(xs, shift)), Level(tau)) == pytest.approx(base + shift, abs=1e-8 * (span + abs(shift)))
        assert laws_expectile(s.scaled(scale), Level(tau)) == pytest.approx(scale * base, abs=1e-8 * scale * span)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40, unique=True), taus)
    def test_strictly_inside_range(self, xs, tau):
        got = laws_expectile(Series(xs), Level(tau))
        assert min(xs) < got < max(xs)

    @given(values, taus)
    def test_foc_residual_small(self, xs, tau):
        got = laws_expectile(Series(xs), Level(tau))
        assert foc_residual(np.asarray(xs), got, tau) < 1e-9


class TestQuantileBased:
    def test_half_is_quantile(self):
        s = pareto(0.5, 1000, 1)
        tau = Level(0.95)
        assert qb_expectile(s, tau, fit(0.5)) == empirical_quantile(s, tau)

    def test_third_constant(self):
        s = pareto(0.5, 1000, 1)
        tau = Level(0.95)
        assert qb_expectile(s, tau, fit(1 / 3)) == pytest.approx(2 ** (-1 / 3) * empirical_quantile(s, tau))
        assert 2 ** (-1 / 3) == pytest.approx(0.7937, abs=1e-4)

    @pytest.mark.parametrize("g", [0.0, 1.0, 1.5])
    def test_undefined_constant(self, g):
        with pytest.raises(NumericalError, match="proportionality constant undefined"):
            qb_expectile(Series([1.0, 2.0, 3.0]), Level(0.5), TailFit(g, "hill", 1, Level(0.5)))

    def test_concordance_with_laws(self):
        n, k = 100_000, 500
        tau = Level.intermediate(k, n)
        ratios = []
        for seed in SEEDS:
            s = pareto(1 / 3, n, seed)
            ratios.append(qb_expectile(s, tau, hill(s, k)) / laws_expectile(s, tau))
        exact = 2 ** (-1 / 3) * tau.tail ** (-1 / 3) / pareto_expectile(1 / 3, tau.tail)
        assert np.mean(ratios) == pytest.approx(exact, abs=0.02)


class TestExtrapolate:
    def test_same_level(self):
        spec = ExtrapolationSpec(Level(0.9), Level(0.9), fit(0.4))
        assert extrapolate(3.0, spec) == 3.0

    def test_power_law(self):
        spec = ExtrapolationSpec(Level.from_tail(0.1), Level.from_tail(0.001), fit(0.5))
        assert extrapolate(2.0, spec) == pytest.approx(20.0)

    def test_rejects_level_below(self):
        with pytest.raises(ValueError):
            ExtrapolationSpec(Level(0.99), Level(0.9), fit(0.5))

    @pytest.mark.parametrize("base", [0.0, -1.0])
    def test_rejects_nonpositive_base(self, base):
        with pytest.raises(NumericalError):
            extrapolate(base, ExtrapolationSpec(Level(0.9), Level(0.99), fit(0.5)))

    @given(st.floats(1e-6, 0.5), st.floats(1e-3, 1.0), st.floats(1e-3, 1.0), st.floats(0.05, 0.95))
    def test_chaining(self, tail_n, f1, f2, g):
        t0 = Level.from_tail(tail_n)
        t1 = Level.from_tail(tail_n * f1)
        t2 = Level.from_tail(tail_n * f1 * f2)
        tf = fit(g)
        two = extrapolate(extrapolate(1.5, ExtrapolationSpec(t0, t1, tf)), ExtrapolationSpec(t1, t2, tf))
        assert two == pytest.approx(extrapolate(1.5, ExtrapolationSpec(t0, t2, tf)), rel=1e-12)

    def test_pareto_extreme_expectile(self):
        n, k = 100_000, 500
        tau_n, tau_p = Level.intermediate(k, n), Level.from_tail(1 / n)
        est = []
        for seed in SEEDS:
            s = pareto(1 / 3, n, seed)
            est.append(extrapolate(laws_expectile(s, tau_n), ExtrapolationSpec(tau_n, tau_p, hill(s, k))))
        assert np.mean(est) == pytest.approx(pareto_expectile(1 / 3, 1 / n), rel=0.25)


class TestWeissman:
    def test_same_level_is_quantile(self):
        s = pareto(0.5, 1000, 2)
        tau = Level.intermediate(50, 1000)
        assert weissman_quantile(s, tau, tau, hill(s, 50)) == empirical_quantile(s, tau)

    def test_pareto_extreme_quantile(self):
        n, k = 100_000, 1000
        tau_n, alpha = Level.intermediate(k, n), Level.from_tail(1 / n)
        est = [weissman_quantile(s, tau_n, alpha, hill(s, k)) for s in (pareto(0.5, n, i) for i in SEEDS)]
        assert np.mean(est) == pytest.approx(n**0.5, rel=0.30)

    def test_doubling_tail(self):
        s = pareto(0.5, 1000, 3)
        tau_n = Level.intermediate(50, 1000)
        f = hill(s, 50)
        a = weissman_quantile(s, tau_n, Level.from_tail(0.001), f)
        b = weissman_quantile(s, tau_n, Level.from_tail(0.002), f)
        assert b / a == pytest.approx(2 ** (-f.gamma), rel=1e-12)


class TestCompositeLevel:
    def test_half_gives_alpha(self):
        assert tau_prime_hat(Level(0.999), fit(0.5)).tail == pytest.approx(0.001, rel=1e-15)

    def test_third(self):
        assert tau_prime_hat(Level(0.999), fit(1 / 3)).tau == pytest.approx(0.9995, abs=1e-12)

    @pytest.mark.parametrize("g", [0.0, 1.0, 0.9995])
    def test_gamma_too_large(self, g):
        with pytest.raises(NumericalError, match="gamma too large"):
            tau_prime_hat(Level(0.999), fit(g))


class TestComposite:
    def test_two_form_identity(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            n = int(rng.integers(200, 3000))
            s = Series(rng.standard_t(rng.uniform(2.5, 6), n))
            tau_n = Level.intermediate(int(rng.integers(10, n // 5)), n)
            alpha = Level.from_tail(1 / n)
            a = composite_laws(s, tau_n, alpha)
            b = composite_laws_via_alpha(s, tau_n, alpha)
            assert abs(a - b) <= 1e-12 * abs(b)

    def half_sample(self):
        # top two log-excesses 0.25 and 0.75 over threshold 1 give Hill = 0.5
        return Series([0.2, 0.5, 1.0, np.exp(0.25), np.exp(0.75)])

    def test_half_sample_has_half(self):
        assert hill(self.half_sample(), 2).gamma == pytest.approx(0.5, abs=1e-15)

    def test_qb_equals_weissman_at_half(self):
        s = self.half_sample()
        tau_n, alpha = Level.intermediate(2, 5), Level.from_tail(0.01)
        got = composite_qb(s, tau_n, alpha)
        assert got == pytest.approx(weissman_quantile(s, tau_n, alpha, hill(s, 2)), rel=1e-14)

    def test_laws_equals_direct_at_half(self):
        s = self.half_sample()
        tau_n, alpha = Level.intermediate(2, 5), Level.from_tail(0.01)
        direct = extrapolate(laws_expectile(s, tau_n), ExtrapolationSpec(tau_n, alpha, hill(s, 2)))
        assert composite_laws(s, tau_n, alpha) == pytest.approx(direct, rel=1e-14)

    def test_qb_equals_weissman_in_general(self):
        s = pareto(0.3, 5000, 4)
        tau_n, alpha = Level.intermediate(200, 5000), Level.from_tail(1 / 5000)
        assert composite_qb(s, tau_n, alpha) == pytest.approx(
            weissman_quantile(s, tau_n, alpha, hill(s, 200)), rel=1e-12
        )
