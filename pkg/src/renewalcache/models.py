"""Unit-mean inter-arrival time families and their derived laws.

Each family is normalized so the base process has mean inter-arrival time 1
(intensity 1).  Per-item processes at other rates are obtained downstream by
time-scaling this base law, so everything here is expressed for rate 1.

Derived quantities available for every family:

* ``cdf`` / ``pdf``            -- inter-arrival law F0
* ``age_cdf``                  -- stationary age law F(t) = integral of the
                                  survival function 1 - F0
* ``hazard`` / ``hazard_inverse``
* ``ohr_cdf`` / ``ohr_cdf_sync`` -- law of the hazard rate observed at a
                                  stationary time (resp. at an arrival)
* exact samplers for F0, the age law, and the joint (age, residual) pair
  used for stationary initialization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special


class HazardDirection(enum.Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"
    CONSTANT = "constant"


class OutOfHazardRange(ValueError):
    """Requested rate is outside the open range of the hazard function."""


def _check_nonnegative(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("time must be nonnegative")


def erlang_b(load: np.ndarray | float, servers: int):
    """Erlang-B blocking probability B(load, servers) via the standard recursion."""
    b = np.ones_like(np.asarray(load, dtype=np.float64))
    load = np.asarray(load, dtype=np.float64)
    for j in range(1, servers + 1):
        lb = load * b
        b = lb / (j + lb)
    return b


@dataclass(frozen=True)
class Pareto:
    """Heavy-tailed family with strictly decreasing hazard (bursty requests).

    ``cdf(t) = 1 - (1 + scale*t)**-shape`` with ``scale = 1/(shape-1)`` so the
    mean is 1.
    """

    shape: float
    scale: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.shape <= 1:
            raise ValueError("shape must exceed 1 for a finite mean")
        if self.scale is None:
            object.__setattr__(self, "scale", 1.0 / (self.shape - 1.0))

    # -- base law -------------------------------------------------------
    def cdf(self, t):
        _check_nonnegative(t)
        return 1.0 - (1.0 + self.scale * np.asarray(t, dtype=np.float64)) ** -self.shape

    def pdf(self, t):
        _check_nonnegative(t)
        a, g = self.shape, self.scale
        return a * g * (1.0 + g * np.asarray(t, dtype=np.float64)) ** -(a + 1.0)

    def cdf_inverse(self, p):
        return (np.power(1.0 - np.asarray(p, dtype=np.float64), -1.0 / self.shape) - 1.0) / self.scale

    # -- derived laws ---------------------------------------------------
    def age_cdf(self, t):
        _check_nonnegative(t)
        return 1.0 - (1.0 + self.scale * np.asarray(t, dtype=np.float64)) ** -(self.shape - 1.0)

    def age_cdf_inverse(self, p):
        p = np.asarray(p, dtype=np.float64)
        return (np.power(1.0 - p, -1.0 / (self.shape - 1.0)) - 1.0) / self.scale

    def hazard(self, t):
        _check_nonnegative(t)
        return self.shape * self.scale / (1.0 + self.scale * np.asarray(t, dtype=np.float64))

    @property
    def hazard_direction(self):
        return HazardDirection.DECREASING

    @property
    def hazard_sup(self):
        return self.shape * self.scale

    def hazard_inverse(self, x):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0) or np.any(x > self.hazard_sup):
            raise OutOfHazardRange(f"rate outside (0, {self.hazard_sup}]")
        return (self.hazard_sup / x - 1.0) / self.scale

    def ohr_cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = np.clip(x / self.hazard_sup, 0.0, 1.0)
        return y ** (self.shape - 1.0)

    def ohr_cdf_sync(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = np.clip(x / self.hazard_sup, 0.0, 1.0)
        return y**self.shape

    def ohr_cdf_scalar(self, x: float) -> float:
        return float(self.ohr_cdf(x))

    def ohr_cdf_sync_scalar(self, x: float) -> float:
        return float(self.ohr_cdf_sync(x))

    # -- samplers -------------------------------------------------------
    def sample(self, rng, size=None):
        return self.cdf_inverse(rng.random(size))

    def sample_age(self, rng, size=None):
        return self.age_cdf_inverse(rng.random(size))

    def sample_stationary_pair(self, rng, size):
        """Joint (age, residual) sample at a stationary instant.

        The residual is the conditional remainder of F0 past the sampled age;
        for this family the conditional inverse has a closed form.
        """
        age = self.age_cdf_inverse(rng.random(size))
        u = rng.random(size)
        residual = (1.0 + self.scale * age) * (np.power(1.0 - u, -1.0 / self.shape) - 1.0) / self.scale
        return age, residual


@dataclass(frozen=True)
class Erlang:
    """Erlang family with ``stages`` phases, rate ``stages`` (unit mean).

    Hazard is constant for one stage and strictly increasing toward
    ``stages`` otherwise, modelling regular (non-bursty) request streams.
    """

    stages: int

    def __post_init__(self):
        if self.stages < 1:
            raise ValueError("stages must be >= 1")

    def cdf(self, t):
        _check_nonnegative(t)
        k = self.stages
        return special.gammainc(k, k * np.asarray(t, dtype=np.float64))

    def pdf(self, t):
        _check_nonnegative(t)
        k = self.stages
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = k * math.log(k) + (k - 1) * np.log(t) - k * t - math.lgamma(k)
        out = np.exp(logpdf)
        if k == 1:
            out = np.where(t == 0, float(k), out)
        else:
            out = np.where(t == 0, 0.0, out)
        return out

    def age_cdf(self, t):
        """Uniform mixture over stages j=1..k of Gamma(j, rate k) cdfs.

        Integrating the equilibrium density 1 - F0 term by term gives this
        exact mixture, so no quadrature is needed.
        """
        _check_nonnegative(t)
        k = self.stages
        kt = k * np.asarray(t, dtype=np.float64)
        total = np.zeros_like(kt)
        for j in range(1, k + 1):
            total += special.gammainc(j, kt)
        return total / k

    def hazard(self, t):
        _check_nonnegative(t)
        k = self.stages
        return k * erlang_b(k * np.asarray(t, dtype=np.float64), k - 1)

    @property
    def hazard_direction(self):
        return HazardDirection.CONSTANT if self.stages == 1 else HazardDirection.INCREASING

    @property
    def hazard_sup(self):
        # approached but never attained for stages >= 2
        return float(self.stages)

    def hazard_inverse(self, x):
        """Invert the hazard by bisection (vectorized, monotone for k >= 2)."""
        if self.stages == 1:
            raise OutOfHazardRange("constant hazard has no inverse")
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0) or np.any(x >= self.hazard_sup):
            raise OutOfHazardRange(f"rate outside (0, {self.hazard_sup})")
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        while True:
            mask = self.hazard(hi) < x
            if not mask.any():
                break
            hi[mask] *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.hazard(mid) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max((hi - lo) / hi) <= 1e-13:
                break
        out = 0.5 * (lo + hi)
        return float(out[0]) if scalar else out

    def _ohr_from(self, age_like_cdf, x):
        x = np.asarray(x, dtype=np.float64)
        if self.stages == 1:
            return np.where(x >= 1.0, 1.0, 0.0)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.ones_like(x)
        inside = (x > 0) & (x < self.hazard_sup)
        if np.any(inside):
            out[inside] = age_like_cdf(self.hazard_inverse(x[inside]))
        out[x <= 0] = 0.0
        return float(out[0]) if scalar else out

    def ohr_cdf(self, x):
        return self._ohr_from(self.age_cdf, x)

    def ohr_cdf_sync(self, x):
        return self._ohr_from(self.cdf, x)

    # scalar fast paths (plain floats, no array overhead) used by quadrature
    def _hazard_scalar(self, t: float) -> float:
        load = self.stages * t
        b = 1.0
        for j in range(1, self.stages):
            lb = load * b
            b = lb / (j + lb)
        return self.stages * b

    def _hazard_inverse_scalar(self, x: float) -> float:
        lo, hi = 0.0, 1.0
        while self._hazard_scalar(hi) < x:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self._hazard_scalar(mid) < x:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-13 * hi:
                break
        return 0.5 * (lo + hi)

    def ohr_cdf_scalar(self, x: float) -> float:
        if x <= 0:
            return 0.0
        if x >= self.hazard_sup:
            return 1.0
        if self.stages == 1:
            return 0.0
        t = self._hazard_inverse_scalar(x)
        kt = self.stages * t
        return sum(float(special.gammainc(j, kt)) for j in range(1, self.stages + 1)) / self.stages

    def ohr_cdf_sync_scalar(self, x: float) -> float:
        if x <= 0:
            return 0.0
        if x >= self.hazard_sup:
            return 1.0
        if self.stages == 1:
            return 0.0
        t = self._hazard_inverse_scalar(x)
        return float(special.gammainc(self.stages, self.stages * t))

    def sample(self, rng, size=None):
        k = self.stages
        n = 1 if size is None else int(size)
        u = rng.random((n, k))
        s = -np.log1p(-u).sum(axis=1) / k
        return float(s[0]) if size is None else s

    def sample_age(self, rng, size=None):
        age, _ = self.sample_stationary_pair(rng, 1 if size is None else size)
        return float(age[0]) if size is None else age

    def sample_stationary_pair(self, rng, size):
        """Exact stationary (age, residual) via the Poisson phase construction.

        The interval covering a stationary instant is Gamma(k+1, k) split at a
        uniform stage J in {1..k}: age ~ Gamma(J, k), residual ~ Gamma(k+1-J, k),
        independent given J.  The resulting joint density is f0(age+residual),
        as required.
        """
        k = self.stages
        n = int(size)
        stage = np.minimum((rng.random(n) * k).astype(np.int64) + 1, k)
        exps_a = -np.log1p(-rng.random((n, k))) / k
        exps_r = -np.log1p(-rng.random((n, k))) / k
        idx = np.arange(1, k + 1)
        age = np.where(idx[None, :] <= stage[:, None], exps_a, 0.0).sum(axis=1)
        residual = np.where(idx[None, :] <= (k + 1 - stage)[:, None], exps_r, 0.0).sum(axis=1)
        return age, residual


@dataclass(frozen=True)
class Exponential:
    """Memoryless family; constant hazard 1 (Poisson requests)."""

    def cdf(self, t):
        _check_nonnegative(t)
        return -np.expm1(-np.asarray(t, dtype=np.float64))

    def pdf(self, t):
        _check_nonnegative(t)
        return np.exp(-np.asarray(t, dtype=np.float64))

    def cdf_inverse(self, p):
        return -np.log1p(-np.asarray(p, dtype=np.float64))

    def age_cdf(self, t):
        return self.cdf(t)

    def hazard(self, t):
        _check_nonnegative(t)
        return np.ones_like(np.asarray(t, dtype=np.float64))

    @property
    def hazard_direction(self):
        return HazardDirection.CONSTANT

    @property
    def hazard_sup(self):
        return 1.0

    def hazard_inverse(self, x):
        raise OutOfHazardRange("constant hazard has no inverse")

    def ohr_cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x >= 1.0, 1.0, 0.0)

    ohr_cdf_sync = ohr_cdf

    def ohr_cdf_scalar(self, x: float) -> float:
        return 1.0 if x >= 1.0 else 0.0

    ohr_cdf_sync_scalar = ohr_cdf_scalar

    def sample(self, rng, size=None):
        return self.cdf_inverse(rng.random(size))

    sample_age = sample

    def sample_stationary_pair(self, rng, size):
        # memoryless: age and residual are independent exponentials
        return self.sample(rng, size), self.sample(rng, size)


InterArrivalModel = Pareto | Erlang | Exponential

_KERNEL_CODES = {Pareto: 0, Erlang: 1, Exponential: 2}


def kernel_descriptor(model: InterArrivalModel) -> tuple[int, float, float]:
    """(kind, param, scale) triple consumed by the event-loop kernels."""
    kind = _KERNEL_CODES[type(model)]
    if isinstance(model, Pareto):
        return kind, model.shape, model.scale
    if isinstance(model, Erlang):
        return kind, float(model.stages), 0.0
    return kind, 0.0, 0.0
