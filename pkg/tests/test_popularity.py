"""Zipf intensity generation and its large-N limit."""

import numpy as np
import pytest

from renewalcache.popularity import IntensityVector, PopularityLimit, zipf_intensities


class TestZipfIntensities:
    def test_small_catalog_values(self):
        iv = zipf_intensities(4, 1.0)
        assert np.allclose(iv.rates, [4.0, 2.0, 4.0 / 3.0, 1.0], atol=0)

    def test_beta_zero_is_uniform(self):
        iv = zipf_intensities(10, 0.0)
        assert np.all(iv.rates == 1.0)

    def test_least_popular_has_unit_rate(self):
        for beta in (0.3, 1.0, 2.0):
            assert zipf_intensities(50, beta).rates[-1] == 1.0

    def test_total_rate_mean_limit(self):
        # mean rate approaches 1/(1-beta) for beta < 1
        iv = zipf_intensities(1000, 0.5)
        assert iv.total_rate / 1000 == pytest.approx(2.0, rel=0.05)

    def test_validation(self):
        with pytest.raises(ValueError):
            zipf_intensities(0, 0.5)
        with pytest.raises(ValueError):
            zipf_intensities(10, -0.1)
        with pytest.raises(ValueError):
            IntensityVector(np.array([1.0, 2.0]))  # increasing
        with pytest.raises(ValueError):
            IntensityVector(np.array([1.0, 0.0]))  # zero rate


class TestEmpiricalCdf:
    def test_spec_points(self):
        iv = IntensityVector(np.array([4.0, 2.0, 4.0 / 3.0, 1.0]))
        assert iv.empirical_cdf(2.0) == 0.75
        assert iv.empirical_cdf(0.99) == 0.0
        assert iv.empirical_cdf(4.0) == 1.0
        assert iv.empirical_cdf(100.0) == 1.0

    def test_right_continuity(self):
        iv = IntensityVector(np.array([3.0, 2.0, 1.0]))
        assert iv.empirical_cdf(2.0) == pytest.approx(2 / 3)
        assert iv.empirical_cdf(2.0 - 1e-12) == pytest.approx(1 / 3)


class TestLimit:
    def test_cdf_values(self):
        lim = PopularityLimit(1.0)
        assert float(lim.cdf(2.0)) == 0.5
        lim0 = PopularityLimit(0.0)
        assert float(lim0.cdf(1.0)) == 1.0
        assert float(lim0.cdf(17.0)) == 1.0
        assert float(PopularityLimit(0.5).cdf(4.0)) == pytest.approx(0.9375, abs=0)

    def test_uniform_integrability_flag(self):
        assert PopularityLimit(0.5).uniformly_integrable
        assert PopularityLimit(0.99).uniformly_integrable
        assert not PopularityLimit(1.0).uniformly_integrable
        assert PopularityLimit(0.5).mean == 2.0
        assert PopularityLimit(1.5).mean == np.inf

    def test_empirical_converges_to_limit(self):
        # sup distance over a grid at N = 1e4 stays under 0.01
        iv = zipf_intensities(10_000, 0.5)
        lim = PopularityLimit(0.5)
        grid = np.concatenate([np.linspace(1.0, 50.0, 500), iv.rates[:100]])
        sup = float(np.max(np.abs(iv.empirical_cdf(grid) - lim.cdf(grid))))
        assert sup < 0.01

    def test_mean_converges(self):
        iv = zipf_intensities(10_000, 0.5)
        assert iv.total_rate / 10_000 == pytest.approx(2.0, rel=0.02)

    def test_total_rate_growth_regimes(self):
        # superlinear for beta > 1, N log N at beta = 1, linear below
        for beta, predict in [
            (1.5, lambda n: n**1.5),
            (1.0, lambda n: n * np.log(n)),
            (0.5, lambda n: n),
        ]:
            r1 = zipf_intensities(1_000, beta).total_rate
            r2 = zipf_intensities(10_000, beta).total_rate
            assert r2 / r1 == pytest.approx(predict(10_000) / predict(1_000), rel=0.05)
