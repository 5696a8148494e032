# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-loop kernel.

Mirrors ``_kernel_py`` exactly: same uniform-draw order, same IEEE
arithmetic per event, same decision rules, so the two engines produce
bit-identical trajectories from the same bit generator.
"""

import math

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport log1p, pow
from numpy.random cimport bitgen_t

COMPILED = True

cdef int PARETO = 0
cdef int ERLANG = 1
cdef int EXPONENTIAL = 2

cdef int OPTIMAL = 0
cdef int THRESHOLD = 1
cdef int STATIC = 2
cdef int LRU = 3
cdef int TTL_CACHE = 4
cdef int TTL_PREFETCH = 5


cdef inline bint _before(double t1, long long i1, double t2, long long i2) noexcept:
    return t1 < t2 or (t1 == t2 and i1 < i2)


cdef class KernelState:
    cdef int kind, policy, stages
    cdef double param, scale, inv_shape_neg, theta
    cdef Py_ssize_t n, capacity
    cdef long long warmup, horizon
    cdef public long long events_done
    cdef public double clock, warm_time, end_time

    cdef object rates_arr, last_arr, next_arr, timers_arr
    cdef object arrivals_arr, misses_arr
    cdef object dec_times_arr, dec_items_arr, dec_hits_arr
    cdef double[::1] rates, last, next_times, timers
    cdef long long[::1] arrivals_v, misses_v
    cdef double[::1] dec_times_v
    cdef long long[::1] dec_items_v
    cdef unsigned char[::1] dec_hits_v
    cdef bint record

    # binary min-heap of pending arrivals, one entry per item
    cdef object heap_t_arr, heap_i_arr
    cdef double[::1] heap_t
    cdef long long[::1] heap_i
    cdef Py_ssize_t heap_size

    # LRU bookkeeping: doubly linked list over item ids plus two sentinels
    cdef object lru_next_arr, lru_prev_arr, lru_in_arr
    cdef long long[::1] lru_next, lru_prev
    cdef unsigned char[::1] lru_in
    cdef Py_ssize_t lru_fill

    cdef object bit_generator  # keep alive; the raw pointer below aliases it
    cdef bitgen_t *rng

    @property
    def arrivals(self):
        return self.arrivals_arr

    @property
    def misses(self):
        return self.misses_arr

    @property
    def dec_times(self):
        return self.dec_times_arr

    @property
    def dec_items(self):
        return self.dec_items_arr

    @property
    def dec_hits(self):
        return self.dec_hits_arr

    @property
    def last(self):
        return self.last_arr

    @property
    def next(self):
        return self.next_arr


def make_state(kind, param, scale, rates, last, next_, policy, capacity, theta,
               timers, warmup_events, horizon_events, bit_generator,
               record_decisions=False):
    cdef KernelState s = KernelState()
    s.kind = kind
    s.param = param
    s.scale = scale
    s.inv_shape_neg = -1.0 / param if kind == PARETO else 0.0
    s.stages = int(param) if kind == ERLANG else 1
    s.rates_arr = np.ascontiguousarray(rates, dtype=np.float64)
    s.last_arr = np.ascontiguousarray(last, dtype=np.float64)
    s.next_arr = np.ascontiguousarray(next_, dtype=np.float64)
    s.rates = s.rates_arr
    s.last = s.last_arr
    s.next_times = s.next_arr
    s.n = s.rates.shape[0]
    s.policy = policy
    s.capacity = capacity
    s.theta = theta
    if timers is None:
        s.timers_arr = np.zeros(0, dtype=np.float64)
    else:
        s.timers_arr = np.ascontiguousarray(timers, dtype=np.float64)
    s.timers = s.timers_arr
    s.warmup = warmup_events
    s.horizon = horizon_events
    s.bit_generator = bit_generator
    s.rng = <bitgen_t *> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")

    s.arrivals_arr = np.zeros(s.n, dtype=np.int64)
    s.misses_arr = np.zeros(s.n, dtype=np.int64)
    s.arrivals_v = s.arrivals_arr
    s.misses_v = s.misses_arr
    s.events_done = 0
    s.clock = 0.0
    s.warm_time = 0.0
    s.end_time = math.nan

    s.record = bool(record_decisions)
    if s.record:
        s.dec_times_arr = np.zeros(horizon_events, dtype=np.float64)
        s.dec_items_arr = np.zeros(horizon_events, dtype=np.int64)
        s.dec_hits_arr = np.zeros(horizon_events, dtype=np.uint8)
    else:
        s.dec_times_arr = np.zeros(0, dtype=np.float64)
        s.dec_items_arr = np.zeros(0, dtype=np.int64)
        s.dec_hits_arr = np.zeros(0, dtype=np.uint8)
    s.dec_times_v = s.dec_times_arr
    s.dec_items_v = s.dec_items_arr
    s.dec_hits_v = s.dec_hits_arr

    s.heap_t_arr = np.zeros(s.n, dtype=np.float64)
    s.heap_i_arr = np.zeros(s.n, dtype=np.int64)
    s.heap_t = s.heap_t_arr
    s.heap_i = s.heap_i_arr
    s.heap_size = 0
    cdef Py_ssize_t i
    for i in range(s.n):
        _heap_push(s, s.next_times[i], i)

    s.lru_next_arr = np.zeros(s.n + 2, dtype=np.int64)
    s.lru_prev_arr = np.zeros(s.n + 2, dtype=np.int64)
    s.lru_in_arr = np.zeros(s.n, dtype=np.uint8)
    s.lru_next = s.lru_next_arr
    s.lru_prev = s.lru_prev_arr
    s.lru_in = s.lru_in_arr
    # sentinel n = least-recent end, sentinel n+1 = most-recent end
    s.lru_next[s.n] = s.n + 1
    s.lru_prev[s.n + 1] = s.n
    s.lru_fill = 0
    return s


def lru_size(KernelState state):
    return state.lru_fill


cdef void _heap_push(KernelState s, double t, long long item) noexcept:
    cdef Py_ssize_t pos = s.heap_size
    cdef Py_ssize_t parent
    s.heap_size += 1
    s.heap_t[pos] = t
    s.heap_i[pos] = item
    while pos > 0:
        parent = (pos - 1) >> 1
        if _before(s.heap_t[pos], s.heap_i[pos], s.heap_t[parent], s.heap_i[parent]):
            s.heap_t[pos], s.heap_t[parent] = s.heap_t[parent], s.heap_t[pos]
            s.heap_i[pos], s.heap_i[parent] = s.heap_i[parent], s.heap_i[pos]
            pos = parent
        else:
            break


cdef void _heap_pop(KernelState s) noexcept:
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t child, right, size
    s.heap_size -= 1
    size = s.heap_size
    s.heap_t[0] = s.heap_t[size]
    s.heap_i[0] = s.heap_i[size]
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        right = child + 1
        if right < size and _before(s.heap_t[right], s.heap_i[right], s.heap_t[child], s.heap_i[child]):
            child = right
        if _before(s.heap_t[child], s.heap_i[child], s.heap_t[pos], s.heap_i[pos]):
            s.heap_t[pos], s.heap_t[child] = s.heap_t[child], s.heap_t[pos]
            s.heap_i[pos], s.heap_i[child] = s.heap_i[child], s.heap_i[pos]
            pos = child
        else:
            break


cdef inline double _hazard(KernelState s, double u) noexcept:
    cdef double load, b, lb
    cdef int j
    if s.kind == PARETO:
        return (s.param * s.scale) / (1.0 + s.scale * u)
    load = s.stages * u
    b = 1.0
    for j in range(1, s.stages):
        lb = load * b
        b = lb / (j + lb)
    return s.stages * b


cdef inline double _intensity_one(KernelState s, Py_ssize_t i, double t) noexcept:
    cdef double r = s.rates[i]
    if s.kind == EXPONENTIAL:
        return r
    return r * _hazard(s, r * (t - s.last[i]))


cdef bint _decide(KernelState s, Py_ssize_t i, double t) noexcept:
    cdef Py_ssize_t j, cnt
    cdef double xi, x, d
    cdef long long tail_item
    if s.policy == OPTIMAL:
        xi = _intensity_one(s, i, t)
        cnt = 0
        if s.kind == EXPONENTIAL:
            for j in range(s.n):
                x = s.rates[j]
                if x > xi or (x == xi and j < i):
                    cnt += 1
        else:
            for j in range(s.n):
                d = t - s.last[j]
                x = s.rates[j] * _hazard(s, s.rates[j] * d)
                if x > xi or (x == xi and j < i):
                    cnt += 1
        return cnt < s.capacity
    if s.policy == THRESHOLD:
        return _intensity_one(s, i, t) > s.theta
    if s.policy == STATIC:
        return i < s.capacity
    if s.policy == LRU:
        if s.lru_in[i]:
            # unlink, then re-append at the most-recent end
            s.lru_next[s.lru_prev[i]] = s.lru_next[i]
            s.lru_prev[s.lru_next[i]] = s.lru_prev[i]
            _lru_append(s, i)
            return True
        if s.lru_fill == s.capacity:
            tail_item = s.lru_next[s.n]
            s.lru_next[s.n] = s.lru_next[tail_item]
            s.lru_prev[s.lru_next[tail_item]] = s.n
            s.lru_in[tail_item] = 0
            s.lru_fill -= 1
        s.lru_in[i] = 1
        s.lru_fill += 1
        _lru_append(s, i)
        return False
    if s.policy == TTL_CACHE:
        return t - s.last[i] < s.timers[i]
    return t - s.last[i] > s.timers[i]


cdef inline void _lru_append(KernelState s, Py_ssize_t i) noexcept:
    cdef long long prev_mru = s.lru_prev[s.n + 1]
    s.lru_next[prev_mru] = i
    s.lru_prev[i] = prev_mru
    s.lru_next[i] = s.n + 1
    s.lru_prev[s.n + 1] = i


cdef inline double _draw_gap(KernelState s, Py_ssize_t i) noexcept:
    cdef double u, total
    cdef int j
    if s.kind == PARETO:
        u = s.rng.next_double(s.rng.state)
        total = (pow(1.0 - u, s.inv_shape_neg) - 1.0) / s.scale
    elif s.kind == ERLANG:
        total = 0.0
        for j in range(s.stages):
            total += -log1p(-s.rng.next_double(s.rng.state))
        total /= s.stages
    else:
        total = -log1p(-s.rng.next_double(s.rng.state))
    return total / s.rates[i]


def run_until(KernelState s, double until_time, long long max_events):
    """Process events strictly before until_time, at most max_events of them."""
    cdef long long done = 0
    cdef long long idx
    cdef Py_ssize_t i
    cdef double t, t2
    cdef bint hit
    while done < max_events and s.heap_size > 0 and s.heap_t[0] < until_time:
        t = s.heap_t[0]
        i = s.heap_i[0]
        _heap_pop(s)
        hit = _decide(s, i, t)
        idx = s.events_done
        if s.warmup <= idx < s.horizon:
            s.arrivals_v[i] += 1
            if not hit:
                s.misses_v[i] += 1
        if s.record and idx < s.horizon:
            s.dec_times_v[idx] = t
            s.dec_items_v[idx] = i
            s.dec_hits_v[idx] = hit
        s.last[i] = t
        t2 = t + _draw_gap(s, i)
        s.next_times[i] = t2
        _heap_push(s, t2, i)
        s.clock = t
        s.events_done = idx + 1
        if s.events_done == s.warmup:
            s.warm_time = t
        if s.events_done == s.horizon:
            s.end_time = t
        done += 1
    return done
