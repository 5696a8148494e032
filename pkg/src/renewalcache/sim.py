"""Discrete-event runner: couples renewal sources with a policy, collects
miss statistics, threshold traces, OHR snapshots and occupancy samples
across seeded replications.

Measurement protocol: hit/miss statistics are per-arrival (synchronized
sampling); occupancy, the threshold trace and OHR snapshots are taken at
times drawn uniformly over the estimated post-warmup window from a stream
independent of the arrivals (stationary sampling).  If the realized run is
shorter than a drawn sample time, the event loop keeps going (within a
slack budget) so the sample can still be taken; those trailing events are
excluded from the hit/miss statistics either way.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import engine
from .ecdf import EmpiricalCdf
from .models import InterArrivalModel, kernel_descriptor
from .policies import (
    FixedThreshold,
    Lru,
    OptimalCausal,
    PolicyKind,
    Static,
    TtlCache,
    TtlPrefetch,
)
from .popularity import IntensityVector, zipf_intensities
from .process import SourceSet, init_stationary


class InvalidConfig(ValueError):
    pass


class ConfigMismatch(ValueError):
    pass


_POLICY_CODES = {
    OptimalCausal: 0,
    FixedThreshold: 1,
    Static: 2,
    Lru: 3,
    TtlCache: 4,
    TtlPrefetch: 5,
}


@dataclass(frozen=True)
class SimConfig:
    model: InterArrivalModel
    beta: float
    n_items: int
    c: float
    policy: PolicyKind
    horizon_events: int
    warmup_events: Optional[int] = None  # default: 10% of the horizon
    master_seed: int = 0
    replications: int = 1
    snapshot_times: Sequence[float] = ()
    occupancy_samples: int = 0
    record_decisions: bool = False
    rates: Optional[np.ndarray] = None  # overrides the Zipf rates when given

    @property
    def capacity(self) -> int:
        return int(round(self.c * self.n_items))

    @property
    def warmup(self) -> int:
        if self.warmup_events is None:
            return self.horizon_events // 10
        return self.warmup_events

    def validate(self) -> None:
        if self.n_items < 1:
            raise InvalidConfig("n_items must be >= 1")
        if not 0.0 < self.c <= 1.0:
            raise InvalidConfig("c must be in (0, 1]")
        if self.capacity < 1:
            raise InvalidConfig("capacity round(c*N) must be >= 1")
        if self.replications < 1:
            raise InvalidConfig("replications must be >= 1")
        if not self.horizon_events > self.warmup >= 0:
            raise InvalidConfig("need horizon_events > warmup_events >= 0")
        if any(t < 0 for t in self.snapshot_times):
            raise InvalidConfig("snapshot times must be >= 0")
        if self.occupancy_samples < 0:
            raise InvalidConfig("occupancy_samples must be >= 0")
        cap = getattr(self.policy, "capacity", None)
        if cap is not None and cap != self.capacity:
            raise InvalidConfig(f"policy capacity {cap} != round(c*N) = {self.capacity}")
        # keep clock values small enough that double spacing stays far below
        # one mean inter-arrival (spacing ~ 1e-16 * t)
        if self.horizon_events / self.intensities().total_rate > 1e9:
            raise InvalidConfig("horizon too long for float64 event times")

    def intensities(self) -> IntensityVector:
        if self.rates is not None:
            return IntensityVector(np.asarray(self.rates, dtype=np.float64), beta=self.beta)
        return zipf_intensities(self.n_items, self.beta)


@dataclass
class SimReport:
    config: SimConfig
    arrivals: np.ndarray
    misses: np.ndarray
    miss_probability: float
    miss_probability_stderr: float
    miss_rate_per_time: float
    arrival_rate_empirical: float
    elapsed_time: float
    events_counted: int
    trace_times: np.ndarray
    trace_theta: np.ndarray
    trace_theta_lo: np.ndarray
    trace_theta_hi: np.ndarray
    occupancy: np.ndarray
    ghat_snapshots: list  # (time, EmpiricalCdf) pairs
    decisions: Optional[tuple] = None  # (times, items, hits) when recorded
    replication_miss: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def hit_probability(self) -> float:
        return 1.0 - self.miss_probability


def _policy_kernel_args(policy: PolicyKind, n_items: int):
    code = _POLICY_CODES[type(policy)]
    capacity = getattr(policy, "capacity", 0)
    theta = getattr(policy, "theta", 0.0)
    timers = getattr(policy, "timers", None)
    if timers is not None:
        timers = np.broadcast_to(np.asarray(timers, dtype=np.float64), (n_items,)).copy()
    return code, int(capacity), float(theta), timers


def _order_stat(x: np.ndarray, p: float) -> float:
    """inf-style empirical quantile: the ceil(p*n)-th smallest value."""
    n = x.size
    idx = max(math.ceil(min(max(p, 0.0), 1.0) * n), 1) - 1
    return float(np.partition(x, idx)[idx])


def _occupancy(policy, state, kernel, x, age, capacity_n) -> int:
    if isinstance(policy, (OptimalCausal, Static)):
        return min(policy.capacity, capacity_n)
    if isinstance(policy, FixedThreshold):
        return int(np.count_nonzero(x > policy.theta))
    if isinstance(policy, Lru):
        return int(kernel.lru_size(state))
    if isinstance(policy, TtlCache):
        return int(np.count_nonzero(age < policy.timers))
    return int(np.count_nonzero(age > policy.timers))


def run_replication(config: SimConfig, replication_index: int = 0,
                    kernel=None) -> SimReport:
    """One seeded replication; deterministic given (config, index)."""
    config.validate()
    if kernel is None:
        kernel = engine.kernel
    iv = config.intensities()
    n = iv.n_items
    rep_seed = np.random.SeedSequence(config.master_seed).spawn(config.replications)[replication_index]
    init_ss, arrivals_ss, sampling_ss = rep_seed.spawn(3)

    sources = init_stationary(iv, config.model, np.random.default_rng(init_ss))
    kind, param, scale = kernel_descriptor(config.model)
    code, capacity, theta, timers = _policy_kernel_args(config.policy, n)
    state = kernel.make_state(
        kind, param, scale, iv.rates, sources.last_arrival, sources.next_arrival,
        code, capacity, theta, timers, config.warmup, config.horizon_events,
        np.random.PCG64(arrivals_ss), config.record_decisions,
    )

    total_rate = iv.total_rate
    t_warm_est = config.warmup / total_rate
    t_end_est = config.horizon_events / total_rate
    sampling_rng = np.random.default_rng(sampling_ss)
    sample_times = np.sort(
        sampling_rng.uniform(t_warm_est, t_end_est, size=config.occupancy_samples)
    )
    stops = sorted(
        [(float(t), False) for t in sample_times]
        + [(float(t), True) for t in config.snapshot_times]
    )

    cap_n = config.capacity
    p_main = 1.0 - cap_n / n
    p_pm = 1.0 - cap_n / (n - 1) if n > 1 else 0.0
    budget = config.horizon_events + max(1000, config.horizon_events // 10)

    trace_t, trace_q, trace_lo, trace_hi, occ = [], [], [], [], []
    snapshots = []
    done = 0
    for stop_time, want_ghat in stops:
        done += kernel.run_until(state, stop_time, budget - done)
        if done >= budget:
            break  # realized horizon fell far short of this sample time
        x = sources.intensities(stop_time)
        age = stop_time - state.last
        trace_t.append(stop_time)
        trace_q.append(_order_stat(x, p_main))
        trace_lo.append(_order_stat(x, p_pm - 1.0 / n))
        trace_hi.append(_order_stat(x, p_pm + 1.0 / n))
        occ.append(_occupancy(config.policy, state, kernel, x, age, n))
        if want_ghat:
            snapshots.append((stop_time, EmpiricalCdf(x)))
    if state.events_done < config.horizon_events:
        kernel.run_until(state, math.inf, config.horizon_events - state.events_done)

    arrivals = np.asarray(state.arrivals).copy()
    misses = np.asarray(state.misses).copy()
    counted = int(arrivals.sum())
    missed = int(misses.sum())
    elapsed = state.end_time - state.warm_time
    miss_probability = missed / counted if counted else math.nan
    decisions = None
    if config.record_decisions:
        n_dec = min(state.events_done, config.horizon_events)
        decisions = (
            np.asarray(state.dec_times)[:n_dec].copy(),
            np.asarray(state.dec_items)[:n_dec].copy(),
            np.asarray(state.dec_hits)[:n_dec].copy(),
        )
    return SimReport(
        config=config,
        arrivals=arrivals,
        misses=misses,
        miss_probability=miss_probability,
        miss_probability_stderr=math.nan,
        miss_rate_per_time=missed / elapsed,
        arrival_rate_empirical=counted / elapsed,
        elapsed_time=elapsed,
        events_counted=counted,
        trace_times=np.asarray(trace_t),
        trace_theta=np.asarray(trace_q),
        trace_theta_lo=np.asarray(trace_lo),
        trace_theta_hi=np.asarray(trace_hi),
        occupancy=np.asarray(occ, dtype=np.int64),
        ghat_snapshots=snapshots,
        decisions=decisions,
        replication_miss=np.asarray([missed / counted if counted else math.nan]),
    )


def _config_key(config: SimConfig) -> tuple:
    """Everything that must match for reports to be poolable (seeds and
    replication counts may differ; arrays are compared by content)."""
    pol = config.policy
    timers = getattr(pol, "timers", None)
    pol_key = (
        type(pol).__name__,
        getattr(pol, "capacity", None),
        getattr(pol, "theta", None),
        None if timers is None else np.asarray(timers, dtype=np.float64).tobytes(),
    )
    rates = None if config.rates is None else np.asarray(config.rates, dtype=np.float64).tobytes()
    return (
        config.model, config.beta, config.n_items, config.c, pol_key,
        config.horizon_events, config.warmup, tuple(config.snapshot_times),
        config.occupancy_samples, config.record_decisions, rates,
    )


def aggregate(reports: Sequence[SimReport]) -> SimReport:
    """Pool replication reports: counts add, stderr from between-replication
    spread, traces and snapshots concatenate in replication order."""
    if not reports:
        raise ValueError("no reports to aggregate")
    head = reports[0]
    for r in reports[1:]:
        if _config_key(r.config) != _config_key(head.config):
            raise ConfigMismatch("reports built from different configurations")
    arrivals = sum(r.arrivals for r in reports)
    misses = sum(r.misses for r in reports)
    counted = int(arrivals.sum())
    missed = int(misses.sum())
    elapsed = float(sum(r.elapsed_time for r in reports))
    rep_miss = np.concatenate([r.replication_miss for r in reports])
    stderr = float(np.std(rep_miss, ddof=1) / math.sqrt(rep_miss.size)) if rep_miss.size > 1 else math.nan
    return SimReport(
        config=head.config,
        arrivals=arrivals,
        misses=misses,
        miss_probability=missed / counted if counted else math.nan,
        miss_probability_stderr=stderr,
        miss_rate_per_time=missed / elapsed,
        arrival_rate_empirical=counted / elapsed,
        elapsed_time=elapsed,
        events_counted=counted,
        trace_times=np.concatenate([r.trace_times for r in reports]),
        trace_theta=np.concatenate([r.trace_theta for r in reports]),
        trace_theta_lo=np.concatenate([r.trace_theta_lo for r in reports]),
        trace_theta_hi=np.concatenate([r.trace_theta_hi for r in reports]),
        occupancy=np.concatenate([r.occupancy for r in reports]),
        ghat_snapshots=[s for r in reports for s in r.ghat_snapshots],
        decisions=head.decisions if len(reports) == 1 else None,
        replication_miss=rep_miss,
    )


def _replication_task(args):
    config, index, compiled = args
    return run_replication(config, index, engine.get_kernel(compiled))


def run(config: SimConfig, workers: int = 1, kernel=None) -> SimReport:
    """Run all replications and pool them; deterministic given the config."""
    config.validate()
    if config.replications == 1:
        return run_replication(config, 0, kernel)
    if workers > 1 and kernel is None:
        tasks = [(config, r, None) for r in range(config.replications)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_replication_task, tasks))
    else:
        reports = [run_replication(config, r, kernel) for r in range(config.replications)]
    return aggregate(reports)


def empirical_ghat(sources: SourceSet, t: float) -> EmpiricalCdf:
    """Empirical distribution of the N observed hazard rates at time t."""
    return EmpiricalCdf(sources.intensities(t))


def theta_hat(x, capacity: int) -> float:
    """Empirical storage threshold: the (N-C)-th order statistic of the OHRs."""
    x = np.asarray(x, dtype=np.float64)
    return _order_stat(x, 1.0 - capacity / x.size)
