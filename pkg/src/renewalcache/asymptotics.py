"""Large-catalog limits: the mixed observed-hazard-rate law, the storage
threshold it defines, and asymptotic / finite-N miss probabilities.

For Pareto inter-arrivals with Zipf popularities everything has a closed
form; other combinations use adaptive quadrature against the limiting
popularity law.  The substitution ``u = lambda**(-1/beta)`` maps the tail
integral over rates in [1, inf) onto the unit interval exactly, and the
region where the OHR law saturates at 1 is split off and integrated in
closed form, so the integrands handed to the quadrature are smooth.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .models import InterArrivalModel, Pareto
from .popularity import IntensityVector

QUAD_ABS_TOL = 1e-10


class ThresholdNotUnique(RuntimeError):
    """The limit OHR distribution is flat at the requested quantile level."""


class MissMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    NON_INTEGRABLE_ZERO = "non_integrable_zero"
    FINITE_N = "finite_n"


@dataclass(frozen=True)
class MissEstimate:
    value: float
    method: MissMethod

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("miss probability must lie in [0, 1]")


@dataclass(frozen=True)
class LimitSpec:
    """A (base inter-arrival law, Zipf tail, storage fraction) triple."""

    model: InterArrivalModel
    beta: float
    c: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not 0.0 < self.c <= 1.0:
            raise ValueError("storage fraction c must be in (0, 1]")


def critical_fraction(shape: float, beta: float) -> float:
    """Storage fraction where the Pareto-Zipf formulas switch branch."""
    return (shape - 1.0) * beta / ((shape - 1.0) * beta + 1.0)


# ---------------------------------------------------------------------------
# closed forms (Pareto inter-arrivals + Zipf popularities)
# ---------------------------------------------------------------------------

def pareto_zipf_g_infinity(shape: float, beta: float, x):
    x = np.asarray(x, dtype=np.float64)
    knee = shape / (shape - 1.0)
    ca = critical_fraction(shape, beta)
    y = np.maximum((shape - 1.0) / shape * x, 0.0)
    lower = (1.0 - ca) * np.power(y, shape - 1.0)
    if beta > 0:
        # the upper branch is only kept where x > knee (y > 1); values
        # computed below that overflow harmlessly and are discarded
        with np.errstate(divide="ignore", over="ignore"):
            upper = 1.0 - ca * np.power(np.maximum(y, 1e-300), -1.0 / beta)
    else:
        upper = np.ones_like(y)
    return np.where(x <= knee, lower, upper)


def pareto_zipf_theta_star(shape: float, beta: float, c: float) -> float:
    knee = shape / (shape - 1.0)
    ca = critical_fraction(shape, beta)
    if c <= ca:
        return knee * (ca / c) ** beta
    return knee * ((1.0 - c) / (1.0 - ca)) ** (1.0 / (shape - 1.0))


def pareto_zipf_miss(shape: float, beta: float, c: float) -> float:
    ca = critical_fraction(shape, beta)
    if c <= ca:
        return 1.0 - shape * beta * (1.0 - ca) * (c / ca) ** (1.0 - beta)
    return (1.0 - beta) * (1.0 - ca) ** (-1.0 / (shape - 1.0)) * (1.0 - c) ** (shape / (shape - 1.0))


def static_policy_asymptotic_miss(beta: float, c: float) -> float:
    """Asymptotic miss probability of always storing the top c-fraction of items."""
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must be in [0, 1)")
    return 1.0 - c ** (1.0 - beta)


# ---------------------------------------------------------------------------
# generic quadrature route
# ---------------------------------------------------------------------------

def _mixture_cdf(ohr_scalar, hazard_sup: float, beta: float, x: float) -> float:
    """Expectation of ohr(x / Lambda) under the limit popularity law."""
    if x <= 0:
        return 0.0
    integrand = lambda u: ohr_scalar(x * u**beta)
    if x >= hazard_sup:
        u_sat = (hazard_sup / x) ** (1.0 / beta)
        head, _ = integrate.quad(integrand, 0.0, u_sat, epsabs=QUAD_ABS_TOL, limit=200)
        return head + (1.0 - u_sat)
    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=QUAD_ABS_TOL, limit=200)
    return val


def g_infinity_quadrature(spec: LimitSpec, x):
    """Quadrature route for the limit OHR law (dual check for the closed form)."""
    model, beta = spec.model, spec.beta
    if beta == 0:
        return model.ohr_cdf(x)
    x = np.asarray(x, dtype=np.float64)
    out = np.array(
        [_mixture_cdf(model.ohr_cdf_scalar, model.hazard_sup, beta, float(v)) for v in np.atleast_1d(x)]
    )
    return float(out[0]) if x.ndim == 0 else out


def g_infinity(spec: LimitSpec, x):
    """Limit distribution of observed hazard rates across the whole catalog."""
    if isinstance(spec.model, Pareto):
        return pareto_zipf_g_infinity(spec.model.shape, spec.beta, x)
    return g_infinity_quadrature(spec, x)


def theta_star(spec: LimitSpec) -> float:
    """Rate threshold at quantile level 1-c of the limit OHR distribution."""
    if spec.c == 1.0:
        return 0.0
    model, beta = spec.model, spec.beta
    if isinstance(model, Pareto):
        return pareto_zipf_theta_star(model.shape, beta, spec.c)

    target = 1.0 - spec.c
    hi = model.hazard_sup
    while g_infinity(spec, hi) < target:
        hi *= 2.0
    lo = 0.0
    # quantile bisection: converge to inf{x : G_inf(x) >= 1-c}
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g_infinity(spec, mid) >= target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    probe = hi + max(1e-6 * hi, 1e-9)
    if g_infinity(spec, probe) <= target:
        raise ThresholdNotUnique(f"limit OHR law is flat at level {target}")
    return hi


def _miss_numerator(model, beta: float, theta: float) -> float:
    """Expectation of Lambda * G0(theta / Lambda); bounded above by theta."""
    if theta <= 0:
        return 0.0
    integrand = lambda u: u**-beta * model.ohr_cdf_sync_scalar(theta * u**beta)
    if theta >= model.hazard_sup:
        u_sat = (model.hazard_sup / theta) ** (1.0 / beta)
        head, _ = integrate.quad(integrand, 0.0, u_sat, epsabs=QUAD_ABS_TOL, limit=200)
        tail = (1.0 - u_sat ** (1.0 - beta)) / (1.0 - beta)
        return head + tail
    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=QUAD_ABS_TOL, limit=200)
    return val


def asymptotic_miss_quadrature(spec: LimitSpec) -> float:
    """Quadrature route for the asymptotic miss probability (beta < 1)."""
    theta = theta_star_generic(spec)
    if spec.beta == 0:
        return spec.model.ohr_cdf_sync_scalar(theta)
    return _miss_numerator(spec.model, spec.beta, theta) * (1.0 - spec.beta)


def theta_star_generic(spec: LimitSpec) -> float:
    """theta_star forced through the generic (non closed-form) route."""
    if isinstance(spec.model, Pareto):
        generic = LimitSpec(_NoClosedForm(spec.model), spec.beta, spec.c)
        return theta_star(generic)
    return theta_star(spec)


class _NoClosedForm:
    """Wrapper hiding a model's type so dispatch takes the quadrature route."""

    def __init__(self, model):
        self._model = model

    def __getattr__(self, name):
        return getattr(self._model, name)


def asymptotic_miss_probability(spec: LimitSpec) -> MissEstimate:
    """Large-catalog miss probability of the optimal policy.

    Zero (exactly) when the limit popularity law has infinite mean: the most
    popular items then dominate the request stream and even a static policy
    misses a vanishing fraction.
    """
    model, beta = spec.model, spec.beta
    if beta >= 1.0:
        return MissEstimate(0.0, MissMethod.NON_INTEGRABLE_ZERO)
    if isinstance(model, Pareto):
        if beta > 0:
            return MissEstimate(pareto_zipf_miss(model.shape, beta, spec.c), MissMethod.CLOSED_FORM)
        value = float(model.ohr_cdf_sync(theta_star(spec)))
        return MissEstimate(value, MissMethod.CLOSED_FORM)
    theta = theta_star(spec)
    if beta == 0:
        return MissEstimate(model.ohr_cdf_sync_scalar(theta), MissMethod.QUADRATURE)
    numerator = _miss_numerator(model, beta, theta)
    return MissEstimate(numerator * (1.0 - beta), MissMethod.QUADRATURE)


def finite_n_miss_approx(spec: LimitSpec, iv: IntensityVector) -> MissEstimate:
    """Rate-weighted miss estimate for a finite catalog, plugging the
    asymptotic threshold in place of the (nearly constant) empirical one."""
    theta = theta_star(spec)
    rates = iv.rates
    value = float(np.sum(rates * spec.model.ohr_cdf_sync(theta / rates)) / rates.sum())
    return MissEstimate(value, MissMethod.FINITE_N)
