"""Zipf-scaled per-item request intensities and their large-N limit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IntensityVector:
    """Per-item request rates, sorted nonincreasing, all positive."""

    rates: np.ndarray
    beta: float | None = None  # tail parameter when Zipf-generated

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=np.float64)
        if rates.ndim != 1 or rates.size == 0:
            raise ValueError("rates must be a nonempty 1-d array")
        if np.any(rates <= 0):
            raise ValueError("rates must be strictly positive")
        if np.any(np.diff(rates) > 0):
            raise ValueError("rates must be sorted nonincreasing")
        object.__setattr__(self, "rates", rates)

    @property
    def n_items(self) -> int:
        return self.rates.size

    @property
    def total_rate(self) -> float:
        return float(self.rates.sum())

    def empirical_cdf(self, lam):
        """Fraction of items with rate <= lam (right-continuous step function)."""
        lam = np.asarray(lam, dtype=np.float64)
        above = np.searchsorted(-self.rates, -lam, side="left")  # rates strictly > lam
        return (self.n_items - above) / self.n_items


def zipf_intensities(n_items: int, beta: float) -> IntensityVector:
    """Rates (n/i)**beta for ranks i = 1..n; the least popular item has rate 1."""
    if n_items < 1:
        raise ValueError("n_items must be >= 1")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    ranks = np.arange(1, n_items + 1, dtype=np.float64)
    return IntensityVector((n_items / ranks) ** beta, beta=beta)


@dataclass(frozen=True)
class PopularityLimit:
    """Limit of the empirical intensity distribution under Zipf scaling.

    For beta > 0 this is a Pareto law with tail index 1/beta on [1, inf);
    beta = 0 degenerates to a unit mass at rate 1.  The mean is finite only
    for beta < 1, which is what separates positive from vanishing asymptotic
    miss probability.
    """

    beta: float

    @property
    def uniformly_integrable(self) -> bool:
        return self.beta < 1

    @property
    def mean(self) -> float:
        if self.beta >= 1:
            return float("inf")
        return 1.0 / (1.0 - self.beta)

    def cdf(self, lam):
        lam = np.asarray(lam, dtype=np.float64)
        if self.beta == 0:
            return np.where(lam >= 1.0, 1.0, 0.0)
        out = 1.0 - np.power(np.maximum(lam, 1.0), -1.0 / self.beta)
        return np.where(lam < 1.0, 0.0, out)
