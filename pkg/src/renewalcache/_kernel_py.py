"""Pure-Python event-loop kernel (fallback when the compiled one is absent).

Semantics contract shared with the compiled kernel in ``_kernel.pyx``:

* events are processed in (time, item) order off a binary min-heap;
* a decision is made from state strictly prior to the arrival (the item's
  own last_arrival is updated only afterwards);
* the only randomness consumed is one uniform per inter-arrival draw
  (``stages`` uniforms for Erlang), pulled from the supplied generator in
  event order.

Scalar transforms below deliberately use ``math`` (libm) rather than numpy
so that both kernels consume identical streams and produce bit-identical
trajectories; the per-event policy scan uses numpy, whose elementwise
arithmetic matches the compiled loop exactly.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

COMPILED = False

PARETO, ERLANG, EXPONENTIAL = 0, 1, 2
OPTIMAL, THRESHOLD, STATIC, LRU, TTL_CACHE, TTL_PREFETCH = 0, 1, 2, 3, 4, 5


class KernelState:
    __slots__ = (
        "kind", "param", "scale", "inv_shape_neg", "stages",
        "rates", "last", "next", "policy", "capacity", "theta", "timers",
        "warmup", "horizon", "rng", "heap",
        "arrivals", "misses", "events_done", "clock", "warm_time", "end_time",
        "lru_stored", "dec_times", "dec_items", "dec_hits",
    )


def make_state(kind, param, scale, rates, last, next_, policy, capacity, theta,
               timers, warmup_events, horizon_events, bit_generator,
               record_decisions=False):
    s = KernelState()
    s.kind = int(kind)
    s.param = float(param)
    s.scale = float(scale)
    s.inv_shape_neg = -1.0 / param if kind == PARETO else 0.0
    s.stages = int(param) if kind == ERLANG else 1
    s.rates = np.ascontiguousarray(rates, dtype=np.float64)
    s.last = np.ascontiguousarray(last, dtype=np.float64)
    s.next = np.ascontiguousarray(next_, dtype=np.float64)
    s.policy = int(policy)
    s.capacity = int(capacity)
    s.theta = float(theta)
    s.timers = None if timers is None else np.ascontiguousarray(timers, dtype=np.float64)
    s.warmup = int(warmup_events)
    s.horizon = int(horizon_events)
    s.rng = np.random.Generator(bit_generator)
    s.heap = [(float(s.next[i]), i) for i in range(s.rates.size)]
    heapq.heapify(s.heap)
    n = s.rates.size
    s.arrivals = np.zeros(n, dtype=np.int64)
    s.misses = np.zeros(n, dtype=np.int64)
    s.events_done = 0
    s.clock = 0.0
    s.warm_time = 0.0
    s.end_time = math.nan
    s.lru_stored = {}
    if record_decisions:
        s.dec_times = np.zeros(horizon_events, dtype=np.float64)
        s.dec_items = np.zeros(horizon_events, dtype=np.int64)
        s.dec_hits = np.zeros(horizon_events, dtype=np.uint8)
    else:
        s.dec_times = s.dec_items = s.dec_hits = None
    return s


def lru_size(state) -> int:
    return len(state.lru_stored)


def _intensities(state, t):
    if state.kind == EXPONENTIAL:
        return state.rates
    u = state.rates * (t - state.last)
    if state.kind == PARETO:
        h = (state.param * state.scale) / (1.0 + state.scale * u)
    else:
        load = state.stages * u
        b = np.ones_like(load)
        for j in range(1, state.stages):
            lb = load * b
            b = lb / (j + lb)
        h = state.stages * b
    return state.rates * h


def _intensity_one(state, i, t):
    r = state.rates[i]
    if state.kind == EXPONENTIAL:
        return r
    u = r * (t - state.last[i])
    if state.kind == PARETO:
        h = (state.param * state.scale) / (1.0 + state.scale * u)
    else:
        load = state.stages * u
        b = 1.0
        for j in range(1, state.stages):
            lb = load * b
            b = lb / (j + lb)
        h = state.stages * b
    return r * h


def _decide(state, i, t) -> bool:
    policy = state.policy
    if policy == OPTIMAL:
        x = _intensities(state, t)
        xi = x[i]
        stronger = int(np.count_nonzero(x > xi)) + int(np.count_nonzero(x[:i] == xi))
        return stronger < state.capacity
    if policy == THRESHOLD:
        return _intensity_one(state, i, t) > state.theta
    if policy == STATIC:
        return i < state.capacity
    if policy == LRU:
        stored = state.lru_stored
        hit = i in stored
        if hit:
            del stored[i]
        elif len(stored) == state.capacity:
            del stored[next(iter(stored))]
        stored[i] = None
        return hit
    if policy == TTL_CACHE:
        return t - state.last[i] < state.timers[i]
    return t - state.last[i] > state.timers[i]


def _draw_gap(state, i) -> float:
    rng = state.rng
    if state.kind == PARETO:
        u = rng.random()
        s = (math.pow(1.0 - u, state.inv_shape_neg) - 1.0) / state.scale
    elif state.kind == ERLANG:
        k = state.stages
        s = 0.0
        for _ in range(k):
            s += -math.log1p(-rng.random())
        s /= k
    else:
        s = -math.log1p(-rng.random())
    return s / state.rates[i]


def run_until(state, until_time, max_events) -> int:
    """Process events strictly before until_time, at most max_events of them."""
    heap = state.heap
    done = 0
    while done < max_events and heap and heap[0][0] < until_time:
        t, i = heapq.heappop(heap)
        hit = _decide(state, i, t)
        idx = state.events_done
        if state.warmup <= idx < state.horizon:
            state.arrivals[i] += 1
            if not hit:
                state.misses[i] += 1
        if state.dec_times is not None and idx < state.horizon:
            state.dec_times[idx] = t
            state.dec_items[idx] = i
            state.dec_hits[idx] = hit
        state.last[i] = t
        t2 = t + _draw_gap(state, i)
        state.next[i] = t2
        heapq.heappush(heap, (t2, i))
        state.clock = t
        state.events_done = idx + 1
        if state.events_done == state.warmup:
            state.warm_time = t
        if state.events_done == state.horizon:
            state.end_time = t
        done += 1
    return done
