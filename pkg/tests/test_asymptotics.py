"""Limit OHR mixture, asymptotic threshold, and miss probability formulas."""

import numpy as np
import pytest

from renewalcache.asymptotics import (
    LimitSpec,
    MissMethod,
    asymptotic_miss_probability,
    asymptotic_miss_quadrature,
    critical_fraction,
    finite_n_miss_approx,
    g_infinity,
    g_infinity_quadrature,
    pareto_zipf_miss,
    static_policy_asymptotic_miss,
    theta_star,
    theta_star_generic,
)
from renewalcache.models import Erlang, Exponential, Pareto
from renewalcache.popularity import zipf_intensities


class TestGInfinity:
    def test_pareto_beta1_lower_branch_value(self):
        spec = LimitSpec(Pareto(2.0), 1.0, 0.1)
        assert float(g_infinity(spec, 2.0)) == pytest.approx(0.5, abs=1e-12)

    def test_pareto_beta1_upper_branch(self):
        spec = LimitSpec(Pareto(2.0), 1.0, 0.1)
        assert float(g_infinity(spec, 4.0)) == pytest.approx(0.75, abs=1e-12)

    def test_beta_zero_reduces_to_base_law(self):
        spec = LimitSpec(Pareto(2.0), 0.0, 0.1)
        grid = np.linspace(0, 3, 31)
        assert np.allclose(g_infinity(spec, grid), Pareto(2.0).ohr_cdf(grid), atol=1e-12)

    def test_erlang_against_monte_carlo(self):
        # brute-force oracle: sample rates from the limit popularity law and
        # OHR values from the base law, compare P(rate * X <= x)
        spec = LimitSpec(Erlang(4), 0.5, 0.1)
        rng = np.random.default_rng(42)
        n = 1_000_000
        lam = rng.random(n) ** -spec.beta
        x_base = Erlang(4).hazard(np.asarray(Erlang(4).sample_age(rng, n)))
        product = lam * x_base
        for x in (1.0, 2.5, 4.0, 6.0):
            mc = float(np.mean(product <= x))
            sigma = np.sqrt(mc * (1 - mc) / n)
            assert float(g_infinity(spec, x)) == pytest.approx(mc, abs=3.5 * sigma + 1e-4)

    @pytest.mark.parametrize("model,beta", [(Pareto(2.0), 0.5), (Erlang(4), 0.5), (Exponential(), 0.7)])
    def test_monotone_cdf_shape(self, model, beta):
        spec = LimitSpec(model, beta, 0.1)
        grid = np.linspace(0.0, 40.0, 120)
        vals = np.asarray([float(g_infinity(spec, x)) for x in grid])
        assert vals[0] == 0.0
        assert np.all(np.diff(vals) >= -1e-12)
        assert vals[-1] > 0.97

    @pytest.mark.parametrize("shape", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 1.0])
    def test_closed_form_matches_quadrature(self, shape, beta):
        spec = LimitSpec(Pareto(shape), beta, 0.1)
        knee = shape / (shape - 1.0)
        for x in (0.3 * knee, 0.9 * knee, knee, 1.5 * knee, 4.0 * knee):
            assert float(g_infinity(spec, x)) == pytest.approx(
                g_infinity_quadrature(spec, x), abs=1e-6
            )

    def test_continuity_at_knee(self):
        for beta in (0.25, 0.5, 1.0):
            spec = LimitSpec(Pareto(2.0), beta, 0.1)
            ca = critical_fraction(2.0, beta)
            below = float(g_infinity(spec, 2.0))
            above = float(g_infinity(spec, np.nextafter(2.0, 3.0)))
            assert below == pytest.approx(1.0 - ca, abs=1e-12)
            assert above == pytest.approx(below, abs=1e-12)


class TestThetaStar:
    def test_pareto_closed_form_points(self):
        assert theta_star(LimitSpec(Pareto(2.0), 1.0, 0.1)) == pytest.approx(10.0, abs=1e-12)
        assert theta_star(LimitSpec(Pareto(2.0), 1.0, 0.5)) == pytest.approx(2.0, abs=1e-12)

    def test_full_storage_gives_zero(self):
        for model in (Pareto(2.0), Erlang(4)):
            assert theta_star(LimitSpec(model, 0.5, 1.0)) == 0.0

    def test_branch_agreement_at_critical_fraction(self):
        ca = critical_fraction(2.0, 1.0)
        assert ca == 0.5
        spec = LimitSpec(Pareto(2.0), 1.0, ca)
        assert theta_star(spec) == pytest.approx(2.0, abs=1e-12)

    def test_quantile_property(self):
        for spec in (LimitSpec(Pareto(2.0), 0.5, 0.1), LimitSpec(Erlang(4), 0.5, 0.1)):
            t = theta_star(spec)
            assert float(g_infinity(spec, t)) == pytest.approx(1.0 - spec.c, abs=1e-9)

    def test_generic_route_matches_closed_form(self):
        for beta in (0.25, 0.5, 0.75):
            spec = LimitSpec(Pareto(2.0), beta, 0.1)
            assert theta_star_generic(spec) == pytest.approx(theta_star(spec), abs=1e-8)

    def test_exponential_step_quantile(self):
        # degenerate base law: every item's OHR equals its rate, so the
        # threshold is the limit popularity quantile
        spec = LimitSpec(Exponential(), 0.5, 0.1)
        assert theta_star(spec) == pytest.approx(0.1**-0.5, abs=1e-9)


class TestAsymptoticMiss:
    def test_fig_curve_values(self):
        # frozen curve values for shape=2, c=0.1
        expected = {
            0.25: 0.7621585769994558,
            0.5: 0.6348516283298892,
            0.75: 0.404272831666749,
            0.9: 0.18909493457977522,
        }
        for beta, value in expected.items():
            est = asymptotic_miss_probability(LimitSpec(Pareto(2.0), beta, 0.1))
            assert est.method is MissMethod.CLOSED_FORM
            assert est.value == pytest.approx(value, abs=1e-9)

    def test_beta_zero_limit(self):
        est = asymptotic_miss_probability(LimitSpec(Pareto(2.0), 0.0, 0.1))
        assert est.value == pytest.approx(0.81, abs=1e-12)

    def test_non_integrable_zero(self):
        for beta in (1.0, 1.5):
            est = asymptotic_miss_probability(LimitSpec(Pareto(2.0), beta, 0.1))
            assert est.value == 0.0
            assert est.method is MissMethod.NON_INTEGRABLE_ZERO

    def test_erlang_quadrature_value(self):
        est = asymptotic_miss_probability(LimitSpec(Erlang(4), 0.5, 0.1))
        assert est.method is MissMethod.QUADRATURE
        assert est.value == pytest.approx(0.5957378725474007, abs=1e-3)

    def test_quadrature_matches_closed_form(self):
        for beta in (0.25, 0.5, 0.75):
            spec = LimitSpec(Pareto(2.0), beta, 0.1)
            assert asymptotic_miss_quadrature(spec) == pytest.approx(
                pareto_zipf_miss(2.0, beta, 0.1), abs=1e-6
            )

    def test_branch_continuity_at_critical_fraction(self):
        for beta in (0.25, 0.5, 0.75):
            ca = critical_fraction(2.0, beta)
            below = pareto_zipf_miss(2.0, beta, ca * (1 - 1e-13))
            above = pareto_zipf_miss(2.0, beta, ca * (1 + 1e-13))
            assert below == pytest.approx(above, abs=1e-12)

    def test_monotone_in_storage_fraction(self):
        for model, beta in ((Pareto(2.0), 0.5), (Erlang(4), 0.5)):
            values = [
                asymptotic_miss_probability(LimitSpec(model, beta, c)).value
                for c in (0.05, 0.1, 0.2, 0.4, 0.8)
            ]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_numerator_bounded_by_threshold(self):
        # the rate-weighted synchronized OHR integral never exceeds theta*
        from renewalcache.asymptotics import _miss_numerator

        for model, beta in ((Pareto(2.0), 0.5), (Erlang(4), 0.5), (Erlang(4), 0.25)):
            spec = LimitSpec(model, beta, 0.1)
            theta = theta_star_generic(spec)
            assert _miss_numerator(model, beta, theta) <= theta + 1e-9


class TestFiniteN:
    def test_erlang_reference_value(self):
        spec = LimitSpec(Erlang(4), 0.5, 0.1)
        est = finite_n_miss_approx(spec, zipf_intensities(1000, 0.5))
        assert est.method is MissMethod.FINITE_N
        assert est.value == pytest.approx(0.6098823436601344, abs=1e-3)

    def test_uniform_rates_collapse_to_g0(self):
        spec = LimitSpec(Pareto(2.0), 0.0, 0.1)
        theta = theta_star(spec)
        est = finite_n_miss_approx(spec, zipf_intensities(100, 0.0))
        assert est.value == pytest.approx(float(Pareto(2.0).ohr_cdf_sync(theta)), abs=1e-12)

    def test_approaches_asymptote(self):
        spec = LimitSpec(Pareto(2.0), 0.5, 0.1)
        est = finite_n_miss_approx(spec, zipf_intensities(10_000, 0.5))
        assert est.value == pytest.approx(pareto_zipf_miss(2.0, 0.5, 0.1), abs=0.01)


class TestStaticPolicy:
    def test_values(self):
        assert static_policy_asymptotic_miss(0.0, 0.1) == pytest.approx(0.9, abs=0)
        assert static_policy_asymptotic_miss(0.5, 0.1) == pytest.approx(1 - 0.1**0.5, abs=1e-12)
        assert static_policy_asymptotic_miss(1 - 1e-12, 0.1) == pytest.approx(0.0, abs=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            static_policy_asymptotic_miss(1.0, 0.1)

    def test_optimal_beats_static(self):
        for beta in (0.0, 0.3, 0.6, 0.9):
            optimal = asymptotic_miss_probability(LimitSpec(Pareto(2.0), beta, 0.1)).value
            assert optimal < static_policy_asymptotic_miss(beta, 0.1)


class TestSpecValidation:
    def test_limits(self):
        with pytest.raises(ValueError):
            LimitSpec(Pareto(2.0), -0.1, 0.1)
        with pytest.raises(ValueError):
            LimitSpec(Pareto(2.0), 0.5, 0.0)
        with pytest.raises(ValueError):
            LimitSpec(Pareto(2.0), 0.5, 1.2)
