"""Per-item stationary renewal sources under the rate scale family.

Item i requests follow the base inter-arrival law time-compressed by its
rate: intervals are base draws divided by the rate, so the stochastic
intensity at time t is ``rate * hazard(rate * (t - last_arrival))``.

Initialization is exactly stationary: each item gets an age drawn from the
base age law and a residual drawn from the conditional remainder of the
inter-arrival law past that age, so no warm-up is needed for the sources
themselves (policy-private state such as an LRU list is another matter).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .models import InterArrivalModel
from .popularity import IntensityVector


class RenewalSource(NamedTuple):
    item_id: int
    rate: float
    last_arrival: float
    next_arrival: float


@dataclass
class SourceSet:
    """Struct-of-arrays state for N renewal sources."""

    model: InterArrivalModel
    rates: np.ndarray
    last_arrival: np.ndarray
    next_arrival: np.ndarray

    @property
    def n_items(self) -> int:
        return self.rates.size

    def __getitem__(self, i: int) -> RenewalSource:
        return RenewalSource(i, float(self.rates[i]), float(self.last_arrival[i]), float(self.next_arrival[i]))

    def intensity(self, i: int, t: float) -> float:
        """Stochastic intensity of item i at time t (left limit: the arrival
        strictly before t must already be recorded in last_arrival)."""
        rate = self.rates[i]
        return float(rate * self.model.hazard(rate * (t - self.last_arrival[i])))

    def intensities(self, t: float) -> np.ndarray:
        """All N stochastic intensities at time t."""
        u = self.rates * (t - self.last_arrival)
        return self.rates * self.model.hazard(u)

    def advance(self, i: int, rng) -> float:
        """Record the pending arrival of item i and draw the next one."""
        t = self.next_arrival[i]
        self.last_arrival[i] = t
        gap = self.model.sample(rng) / self.rates[i]
        self.next_arrival[i] = t + gap
        return float(self.next_arrival[i])


def init_stationary(iv: IntensityVector, model: InterArrivalModel, rng) -> SourceSet:
    """Sources whose state at t=0 has the exact stationary law.

    last_arrival = -age/rate and next_arrival = residual/rate, with (age,
    residual) the joint stationary pair of the unit-rate base process.
    """
    rates = iv.rates
    age, residual = model.sample_stationary_pair(rng, rates.size)
    last = -age / rates
    nxt = residual / rates
    return SourceSet(model=model, rates=rates, last_arrival=last, next_arrival=nxt)
