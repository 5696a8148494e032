"""Empirical distribution functions with exact sup-distance computations."""

from __future__ import annotations

import math

import numpy as np


class EmpiricalCdf:
    """Right-continuous step cdf of a finite sample."""

    def __init__(self, values):
        self.values = np.sort(np.asarray(values, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.values.size

    def __call__(self, x):
        return np.searchsorted(self.values, np.asarray(x, dtype=np.float64), side="right") / self.n

    def quantile(self, p: float) -> float:
        """inf{x : cdf(x) >= p}; p = 0 gives the sample minimum."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        idx = max(math.ceil(p * self.n), 1) - 1
        return float(self.values[idx])

    def drop(self, i: int) -> "EmpiricalCdf":
        """Leave-one-out cdf over the n-1 remaining values."""
        return EmpiricalCdf(np.delete(self.values, i))

    def sup_distance(self, cdf) -> float:
        """Exact Kolmogorov distance to a (right-continuous) cdf callable.

        The supremum is attained at a sample point, comparing against both
        the pre- and post-jump heights of the step function.
        """
        f = np.asarray(cdf(self.values), dtype=np.float64)
        steps = np.arange(1, self.n + 1) / self.n
        return float(np.max(np.maximum(np.abs(f - steps), np.abs(f - (steps - 1.0 / self.n)))))

    def sup_distance_to(self, other: "EmpiricalCdf") -> float:
        """Exact Kolmogorov distance between two step cdfs."""
        grid = np.concatenate([self.values, other.values])
        return float(np.max(np.abs(self(grid) - other(grid))))
