"""Storage policies: descriptors used to configure a run, helpers that size
thresholds/timers to a capacity, and plain-Python reference decision rules.

The event-loop kernels re-implement the decision rules for speed; the
reference implementations here are the readable contract and are replayed
against kernel decision traces in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .models import HazardDirection, InterArrivalModel
from .popularity import IntensityVector
from .process import SourceSet


@dataclass(frozen=True)
class OptimalCausal:
    """Store the capacity-many items with the highest current intensities."""

    capacity: int


@dataclass(frozen=True)
class FixedThreshold:
    """Store every item whose current intensity exceeds a fixed rate."""

    theta: float


@dataclass(frozen=True)
class Static:
    """Store the capacity-many most popular items, always."""

    capacity: int


@dataclass(frozen=True)
class Lru:
    """Store the capacity-many most recently requested items."""

    capacity: int


@dataclass(frozen=True)
class TtlCache:
    """Keep an item for a per-item timer after each request."""

    timers: np.ndarray


@dataclass(frozen=True)
class TtlPrefetch:
    """Evict on request; restore once the per-item timer has elapsed."""

    timers: np.ndarray


PolicyKind = Union[OptimalCausal, FixedThreshold, Static, Lru, TtlCache, TtlPrefetch]


def threshold_from_capacity(iv: IntensityVector, model: InterArrivalModel, capacity: int) -> float:
    """Threshold whose expected stationary occupancy equals the capacity.

    Solves mean over items of G(theta / rate) = 1 - capacity/N by bisection
    (the left side is the average probability of an item sitting below the
    threshold at a stationary instant).
    """
    n = iv.n_items
    if not 0 < capacity <= n:
        raise ValueError("capacity must be in 1..N")
    if capacity == n:
        return 0.0
    target = 1.0 - capacity / n

    def level(theta: float) -> float:
        return float(np.mean(model.ohr_cdf(theta / iv.rates)))

    hi = float(model.hazard_sup * iv.rates[0])
    while level(hi) < target:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if level(mid) >= target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def timers_from_threshold(iv: IntensityVector, model: InterArrivalModel, theta: float) -> np.ndarray:
    """Per-item timers equivalent to the fixed-threshold rule.

    Item i's scaled hazard is rate * hazard(rate * t); solving it against the
    threshold gives the timer.  A threshold outside the attainable range maps
    to an always-store or never-store timer (0 or inf), whose value depends on
    the hazard direction:

    * decreasing hazard (cache semantics, hit while t < timer): intensities
      start high and decay, so an unattainably high threshold means never
      store (timer 0) and a threshold at or below the infimum means always
      store (timer inf);
    * increasing hazard (prefetch semantics, hit once t > timer): the reverse.
    """
    direction = model.hazard_direction
    if direction is HazardDirection.CONSTANT:
        raise ValueError("constant hazard has no timer equivalent")
    rates = iv.rates
    base_x = theta / rates  # threshold in base-process hazard units
    sup = model.hazard_sup
    timers = np.empty_like(rates)
    if direction is HazardDirection.DECREASING:
        # hazard range is (0, sup] with the max attained at age 0
        inside = (base_x > 0) & (base_x <= sup)
        timers[~inside] = np.where(base_x[~inside] <= 0, np.inf, 0.0)
    else:
        inside = (base_x > 0) & (base_x < sup)
        timers[~inside] = np.where(base_x[~inside] <= 0, 0.0, np.inf)
    if np.any(inside):
        timers[inside] = model.hazard_inverse(base_x[inside]) / rates[inside]
    return timers


# ---------------------------------------------------------------------------
# reference decision rules (kernels implement the same semantics)
# ---------------------------------------------------------------------------

def optimal_decide(sources: SourceSet, capacity: int, item: int, t: float) -> bool:
    """Hit iff fewer than `capacity` other items have strictly higher current
    intensity; equal intensities are won by the smaller item id."""
    x = sources.intensities(t)
    xi = x[item]
    stronger = int(np.count_nonzero(x > xi)) + int(np.count_nonzero(x[:item] == xi))
    return stronger < capacity


def threshold_decide(sources: SourceSet, theta: float, item: int, t: float) -> bool:
    return bool(sources.intensity(item, t) > theta)


def ttl_cache_decide(sources: SourceSet, timers: np.ndarray, item: int, t: float) -> bool:
    return bool(t - sources.last_arrival[item] < timers[item])


def ttl_prefetch_decide(sources: SourceSet, timers: np.ndarray, item: int, t: float) -> bool:
    return bool(t - sources.last_arrival[item] > timers[item])


class LruState:
    """Reference LRU bookkeeping (dict preserves recency order)."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._stored: dict[int, None] = {}

    def on_arrival(self, item: int) -> bool:
        stored = self._stored
        hit = item in stored
        if hit:
            del stored[item]
        elif len(stored) == self.capacity:
            del stored[next(iter(stored))]
        stored[item] = None
        return hit

    @property
    def size(self) -> int:
        return len(self._stored)

    def stored_items(self) -> list[int]:
        return list(self._stored)


def occupancy(sources: SourceSet, policy: PolicyKind, t: float, lru: LruState | None = None) -> int:
    """Number of items the policy holds in memory at time t."""
    if isinstance(policy, (OptimalCausal, Static)):
        return min(policy.capacity, sources.n_items)
    if isinstance(policy, Lru):
        if lru is None:
            raise ValueError("LRU occupancy needs the LRU state")
        return lru.size
    if isinstance(policy, FixedThreshold):
        return int(np.count_nonzero(sources.intensities(t) > policy.theta))
    age = t - sources.last_arrival
    if isinstance(policy, TtlCache):
        return int(np.count_nonzero(age < policy.timers))
    if isinstance(policy, TtlPrefetch):
        return int(np.count_nonzero(age > policy.timers))
    raise TypeError(f"unknown policy {policy!r}")
