"""Stationary renewal sources and the scale family."""

import numpy as np
import pytest

from renewalcache.ecdf import EmpiricalCdf
from renewalcache.models import Erlang, Exponential, Pareto
from renewalcache.popularity import IntensityVector, zipf_intensities
from renewalcache.process import init_stationary


def constant_rates(n, rate):
    return IntensityVector(np.full(n, float(rate)))


class TestStationaryInit:
    def test_exponential_forward_recurrence(self):
        # memorylessness: time to first arrival is exponential at each rate
        model = Exponential()
        sources = init_stationary(constant_rates(100_000, 1.0), model, np.random.default_rng(1))
        assert EmpiricalCdf(sources.next_arrival).sup_distance(model.cdf) < 0.01

    def test_pareto_age_law_at_zero(self):
        model = Pareto(2.0)
        sources = init_stationary(constant_rates(100_000, 1.0), model, np.random.default_rng(2))
        ages = -sources.last_arrival
        assert EmpiricalCdf(ages).sup_distance(model.age_cdf) < 0.01

    def test_rate_scaling_halves_times(self):
        # same seed, double the rate: every epoch shrinks by exactly 1/2
        model = Pareto(2.0)
        s1 = init_stationary(constant_rates(1000, 1.0), model, np.random.default_rng(3))
        s2 = init_stationary(constant_rates(1000, 2.0), model, np.random.default_rng(3))
        assert np.allclose(s2.last_arrival, s1.last_arrival / 2.0, rtol=0, atol=0)
        assert np.allclose(s2.next_arrival, s1.next_arrival / 2.0, rtol=0, atol=0)

    @pytest.mark.parametrize("model", [Pareto(2.0), Erlang(4), Exponential()])
    def test_state_ordering(self, model):
        sources = init_stationary(zipf_intensities(10_000, 0.7), model, np.random.default_rng(4))
        assert np.all(sources.last_arrival < sources.next_arrival)
        assert np.all(sources.last_arrival <= 0.0)


class TestAdvance:
    def test_forced_gap_scaling(self, forced_rng):
        # a unit base draw at rate 4 advances the source by 1/4
        model = Exponential()
        sources = init_stationary(constant_rates(1, 4.0), model, np.random.default_rng(5))
        t0 = sources.next_arrival[0]
        u = 1.0 - np.exp(-1.0)
        t1 = sources.advance(0, forced_rng([u]))
        assert t1 - t0 == pytest.approx(0.25, abs=1e-12)
        assert sources.last_arrival[0] == t0

    def test_mean_gap(self):
        model = Pareto(3.0)
        sources = init_stationary(constant_rates(1, 1.0), model, np.random.default_rng(6))
        rng = np.random.default_rng(7)
        gaps = []
        prev = sources.next_arrival[0]
        for _ in range(100_000):
            nxt = sources.advance(0, rng)
            gaps.append(nxt - prev)
            prev = nxt
        gaps = np.asarray(gaps)
        sigma = gaps.std() / np.sqrt(gaps.size)
        assert gaps.mean() == pytest.approx(1.0, abs=3.5 * sigma)

    def test_long_run_event_rate(self):
        # events per unit time approach the configured rate
        model = Erlang(4)
        rate = 3.0
        sources = init_stationary(constant_rates(1, rate), model, np.random.default_rng(8))
        rng = np.random.default_rng(9)
        n = 50_000
        for _ in range(n):
            end = sources.advance(0, rng)
        assert n / end == pytest.approx(rate, rel=0.02)


class TestStochasticIntensity:
    def test_pareto_base_value(self):
        model = Pareto(2.0)
        sources = init_stationary(constant_rates(1, 1.0), model, np.random.default_rng(10))
        sources.last_arrival[0] = 0.0
        assert sources.intensity(0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_exponential_equals_rate(self):
        model = Exponential()
        sources = init_stationary(constant_rates(3, 5.0), model, np.random.default_rng(11))
        assert sources.intensity(1, 2.0) == 5.0

    def test_rate_scaling(self):
        # rate 3 at base age 1/3 gives 3 * hazard(1) = 3
        model = Pareto(2.0)
        sources = init_stationary(constant_rates(1, 3.0), model, np.random.default_rng(12))
        sources.last_arrival[0] = 0.0
        assert sources.intensity(0, 1.0 / 3.0) == pytest.approx(3.0, abs=1e-12)

    def test_vector_matches_scalar(self):
        model = Erlang(4)
        sources = init_stationary(zipf_intensities(50, 0.5), model, np.random.default_rng(13))
        t = 0.37
        vec = sources.intensities(t)
        for i in (0, 7, 49):
            assert vec[i] == pytest.approx(sources.intensity(i, t), abs=1e-14)


class TestOhrScaling:
    @pytest.mark.parametrize("rate", [1.0, 3.0])
    def test_nonsynchronized_ohr_by_class(self, rate):
        # at a fixed time the intensity of a rate-r item follows G(x/r)
        model = Pareto(2.0)
        sources = init_stationary(constant_rates(100_000, rate), model, np.random.default_rng(14))
        x = sources.intensities(0.0)
        assert EmpiricalCdf(x).sup_distance(lambda v: model.ohr_cdf(np.asarray(v) / rate)) < 0.01

    @pytest.mark.parametrize("rate", [1.0, 2.5])
    def test_synchronized_ohr_by_class(self, rate):
        # the intensity seen just before an item's own arrival follows G0(x/r)
        model = Erlang(4)
        rng = np.random.default_rng(15)
        gaps = np.asarray(model.sample(rng, 100_000)) / rate
        x = rate * model.hazard(rate * gaps)
        assert EmpiricalCdf(x).sup_distance(lambda v: model.ohr_cdf_sync(np.asarray(v) / rate)) < 0.01


class TestSourceView:
    def test_indexing(self):
        model = Pareto(2.0)
        sources = init_stationary(zipf_intensities(5, 1.0), model, np.random.default_rng(16))
        view = sources[2]
        assert view.item_id == 2
        assert view.rate == sources.rates[2]
        assert view.last_arrival == sources.last_arrival[2]
        assert view.next_arrival == sources.next_arrival[2]
