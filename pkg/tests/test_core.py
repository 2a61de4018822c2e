import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tailrisk.core import (
    ConfidenceInterval,
    DataError,
    Level,
    Series,
    empirical_quantile,
    empirical_survival,
    ranks_to_uniform,
    tail_count,
)

from conftest import pareto

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
samples = st.lists(finite, min_size=1, max_size=60)


class TestLevel:
    def test_tail_is_complement(self):
        lv = Level(0.99)
        assert lv.tail == pytest.approx(0.01)

    def test_from_tail_keeps_precision(self):
        lv = Level.from_tail(1e-12)
        assert lv.tail == 1e-12

    def test_intermediate(self):
        lv = Level.intermediate(200, 1000)
        assert lv.tail == 0.2
        assert tail_count(1000, lv) == 200

    @pytest.mark.parametrize("tau", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_out_of_range(self, tau):
        with pytest.raises(ValueError):
            Level(tau)

    def test_tail_count_snaps_rounding(self):
        # 1 - 0.9 is not exactly 0.1 in binary
        assert tail_count(10, Level(0.9)) == 1


class TestSeries:
    def test_sorted_and_readonly(self):
        s = Series([3.0, 1.0, 2.0])
        assert list(s.sorted) == [1.0, 2.0, 3.0]
        assert list(s.values) == [3.0, 1.0, 2.0]
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            Series([1.0, np.nan])

    def test_order_stat_one_based(self):
        s = Series([5, 1, 3])
        assert s.order_stat(1) == 1
        assert s.order_stat(3) == 5


class TestQuantile:
    def test_index_arithmetic(self):
        assert empirical_quantile(Series([1, 2, 3, 4, 5]), Level(0.8)) == 4

    def test_single_point(self):
        assert empirical_quantile(Series([7]), Level(0.5)) == 7

    def test_pareto_quantile(self):
        s = pareto(0.5, 100_000, seed=3)
        assert empirical_quantile(s, Level(0.99)) == pytest.approx(10.0, rel=0.05)

    def test_tau_too_small(self):
        with pytest.raises(DataError, match="tau too small"):
            empirical_quantile(Series([7]), Level(1e-12))

    @given(samples, st.floats(0.5, 0.99), st.floats(0.5, 0.99))
    def test_nondecreasing_in_tau(self, xs, t1, t2):
        s = Series(xs)
        lo, hi = sorted((t1, t2))
        try:
            a = empirical_quantile(s, Level(lo))
        except DataError:
            return
        assert a <= empirical_quantile(s, Level(hi))


class TestSurvival:
    def test_count(self):
        assert empirical_survival(Series([1, 2, 3, 4]), 2.5) == 0.5

    def test_bounds(self):
        s = Series([1, 2, 3, 4])
        assert empirical_survival(s, 0) == 1.0
        assert empirical_survival(s, 5) == 0.0

    @given(st.lists(finite, min_size=2, max_size=60, unique=True), st.data())
    def test_exceedances_at_order_statistic(self, xs, data):
        s = Series(xs)
        k = data.draw(st.integers(1, s.n - 1))
        q = empirical_quantile(s, Level.intermediate(k, s.n))
        assert empirical_survival(s, q) <= k / s.n + 1e-15


class TestRanks:
    def test_thirds(self):
        np.testing.assert_allclose(ranks_to_uniform(Series([10, 20, 30])), [1 / 3, 2 / 3, 1])

    def test_ties_average(self):
        np.testing.assert_allclose(ranks_to_uniform(Series([5, 5])), [0.75, 0.75])

    @given(samples)
    def test_range(self, xs):
        u = ranks_to_uniform(Series(xs))
        assert np.all((u > 0) & (u <= 1))

    @given(st.lists(finite, min_size=1, max_size=60, unique=True))
    def test_untied_maximum_has_full_rank(self, xs):
        # a tied maximum gets the average rank, as in the {5, 5} case
        assert ranks_to_uniform(Series(xs)).max() == 1.0

    @given(samples, st.randoms(use_true_random=False))
    def test_permutation_consistent(self, xs, rnd):
        perm = list(range(len(xs)))
        rnd.shuffle(perm)
        u = ranks_to_uniform(Series(xs))
        v = ranks_to_uniform(Series([xs[i] for i in perm]))
        np.testing.assert_allclose(v, u[perm])


class TestConfidenceInterval:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            ConfidenceInterval(2.0, 1.0, 0.95, "d", 0.1)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            ConfidenceInterval(1.0, 2.0, 0.95, "d", -0.1)

    def test_contains(self):
        ci = ConfidenceInterval(1.0, 2.0, 0.95, "iid", 0.25)
        assert ci.contains(1.5) and not ci.contains(2.5)
