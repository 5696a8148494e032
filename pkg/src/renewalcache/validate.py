"""End-to-end health checks wired to the CLI ``validate`` subcommand.

Each check returns a CheckResult; the CLI prints one line per check and
exits nonzero if any fail.  The checks favor redundancy: sampled paths are
compared against closed forms, closed forms against quadrature, and policy
kernels against their analytic equivalents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import policies, sim
from .asymptotics import (
    LimitSpec,
    asymptotic_miss_quadrature,
    critical_fraction,
    g_infinity,
    g_infinity_quadrature,
    pareto_zipf_miss,
    theta_star,
    theta_star_generic,
)
from .ecdf import EmpiricalCdf
from .models import Erlang, Exponential, HazardDirection, Pareto
from .policies import FixedThreshold, TtlCache, TtlPrefetch
from .popularity import zipf_intensities
from .process import init_stationary
from .sim import SimConfig


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


def _default_models():
    return [Pareto(2.0), Pareto(3.0), Erlang(4), Erlang(1), Exponential()]


def check_pareto_closed_forms() -> CheckResult:
    m = Pareto(2.0)
    errs = [
        abs(float(m.ohr_cdf(1.0)) - 0.5),
        abs(float(m.ohr_cdf_sync(1.0)) - 0.25),
        abs(float(m.cdf(1.0)) - 0.75),
        abs(float(m.age_cdf(1.0)) - 0.5),
        abs(float(m.hazard(0.0)) - 2.0),
    ]
    worst = max(errs)
    return CheckResult("pareto_closed_forms", worst == 0.0, f"max abs error {worst:g}")


def check_unit_mean(models=None, seed=0) -> CheckResult:
    """Monte-Carlo unit-mean check (finite-variance families) plus exact
    quadrature of the survival function for every family."""
    rng = np.random.default_rng(seed)
    models = models if models is not None else [Pareto(3.0), Erlang(4), Exponential()]
    worst, worst_name = 0.0, ""
    for m in models:
        mc = float(np.mean(m.sample(rng, 200_000)))
        quad, _ = integrate.quad(lambda t: 1.0 - float(m.cdf(t)), 0.0, np.inf, limit=200)
        err = max(abs(mc - 1.0), abs(quad - 1.0))
        if err > worst:
            worst, worst_name = err, type(m).__name__
    return CheckResult("unit_mean", worst < 0.02, f"max |mean-1| {worst:.4f} ({worst_name})")


def check_density_hazard_identity(models=None) -> CheckResult:
    grid = np.linspace(0.0, 8.0, 321)
    worst = 0.0
    for m in models if models is not None else _default_models():
        lhs = m.pdf(grid)
        rhs = m.hazard(grid) * (1.0 - m.cdf(grid))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("density_hazard_identity", worst < 1e-10, f"max residual {worst:.2e}")


def check_ohr_bound(models=None) -> CheckResult:
    """Synchronized OHR law never exceeds the identity at unit base rate."""
    grid = np.linspace(0.0, 6.0, 601)
    worst = -np.inf
    for m in models if models is not None else _default_models():
        worst = max(worst, float(np.max(m.ohr_cdf_sync(grid) - grid)))
    return CheckResult("ohr_bound", worst <= 1e-12, f"max G0(x)-x = {worst:.2e}")


def check_ks_sampling(seed=1, n_samples=100_000, threshold=0.01) -> CheckResult:
    """Samplers against their cdfs, and hazard-of-sample against the OHR laws."""
    rng = np.random.default_rng(seed)
    worst, worst_name = 0.0, ""
    for m in [Pareto(2.0), Erlang(4), Exponential()]:
        name = type(m).__name__
        draws = np.asarray(m.sample(rng, n_samples))
        ages = np.asarray(m.sample_age(rng, n_samples))
        pairs = [
            (f"{name}/interarrival", EmpiricalCdf(draws), m.cdf),
            (f"{name}/age", EmpiricalCdf(ages), m.age_cdf),
        ]
        if m.hazard_direction is not HazardDirection.CONSTANT:
            # constant hazard makes the OHR degenerate; KS is meaningless there
            pairs += [
                (f"{name}/ohr", EmpiricalCdf(m.hazard(ages)), m.ohr_cdf),
                (f"{name}/ohr_sync", EmpiricalCdf(m.hazard(draws)), m.ohr_cdf_sync),
            ]
        for label, ecdf, cdf in pairs:
            d = ecdf.sup_distance(cdf)
            if d > worst:
                worst, worst_name = d, label
    return CheckResult("ks_sampling", worst < threshold, f"max KS {worst:.4f} ({worst_name})")


def check_timer_equivalence(seed=2, events=100_000) -> CheckResult:
    """Fixed-threshold decisions replayed exactly by timer policies."""
    iv = zipf_intensities(200, 0.5)

    def run_decisions(model, policy):
        cfg = SimConfig(model=model, beta=0.5, n_items=200, c=0.1, policy=policy,
                        horizon_events=events, warmup_events=0, master_seed=seed,
                        record_decisions=True)
        return sim.run(cfg).decisions

    ok = True
    details = []
    for model, timer_cls in [(Pareto(2.0), TtlCache), (Erlang(4), TtlPrefetch)]:
        theta = policies.threshold_from_capacity(iv, model, 20)
        timers = policies.timers_from_threshold(iv, model, theta)
        base = run_decisions(model, FixedThreshold(theta))
        timed = run_decisions(model, timer_cls(timers))
        same = all(np.array_equal(a, b) for a, b in zip(base, timed))
        ok &= same
        details.append(f"{type(model).__name__}:{'ok' if same else 'MISMATCH'}")
    return CheckResult("timer_equivalence", ok, ", ".join(details))


def check_hoeffding_occupancy(seed=3, n_items=10_000, c=0.1, samples=1000) -> CheckResult:
    model = Pareto(2.0)
    iv = zipf_intensities(n_items, 0.5)
    cap = int(round(c * n_items))
    theta = policies.threshold_from_capacity(iv, model, cap)
    cfg = SimConfig(model=model, beta=0.5, n_items=n_items, c=c,
                    policy=FixedThreshold(theta), horizon_events=400_000,
                    warmup_events=40_000, master_seed=seed, occupancy_samples=samples)
    report = sim.run(cfg)
    frac = report.occupancy / n_items
    max_dev = float(np.max(np.abs(frac - c)))
    mean_dev = float(abs(frac.mean() - c))
    ok = max_dev <= 0.02 and mean_dev <= 0.01 * c
    return CheckResult("hoeffding_occupancy", ok, f"max|U/N-c|={max_dev:.4f}, |mean-c|={mean_dev:.5f}")


def check_leave_one_out(seed=4, n_items=200) -> CheckResult:
    """Removing any single item moves the empirical OHR cdf by at most 1/N."""
    model = Pareto(2.0)
    iv = zipf_intensities(n_items, 0.5)
    sources = init_stationary(iv, model, np.random.default_rng(seed))
    full = EmpiricalCdf(sources.intensities(0.0))
    worst = 0.0
    for i in range(n_items):
        loo = full.drop(i)
        grid = full.values
        worst = max(worst, float(np.max(np.abs(full(grid) - loo(grid)))))
    bound = 1.0 / n_items + 1e-15
    return CheckResult("leave_one_out", worst <= bound, f"max sup-dist {worst:.6f} <= 1/N")


def check_asymptotics_dual_route() -> CheckResult:
    """Closed-form Pareto-Zipf limits against the generic quadrature route,
    plus branch continuity at the knee and at the critical fraction."""
    worst = 0.0
    for beta in (0.25, 0.5, 0.75):
        spec = LimitSpec(Pareto(2.0), beta, 0.1)
        for x in (0.5, 1.5, 2.0, 3.0, 6.0):
            worst = max(worst, abs(float(g_infinity(spec, x)) - g_infinity_quadrature(spec, x)))
        worst = max(worst, abs(theta_star(spec) - theta_star_generic(spec)))
        worst = max(worst, abs(pareto_zipf_miss(2.0, beta, 0.1) - asymptotic_miss_quadrature(spec)))
        knee = 2.0
        lo = float(g_infinity(spec, knee))
        hi = float(g_infinity(spec, knee * (1 + 1e-12)))
        worst = max(worst, abs(lo - hi))
        ca = critical_fraction(2.0, beta)
        worst = max(worst, abs(pareto_zipf_miss(2.0, beta, ca * (1 - 1e-12)) - pareto_zipf_miss(2.0, beta, ca * (1 + 1e-12))))
    return CheckResult("asymptotics_dual_route", worst < 1e-6, f"max discrepancy {worst:.2e}")


def run_checks(seed: int = 0, fast: bool = False, models=None) -> list[CheckResult]:
    results = [
        check_pareto_closed_forms(),
        check_unit_mean(models=models, seed=seed),
        check_density_hazard_identity(models=models),
        check_ohr_bound(models=models),
        check_ks_sampling(seed=seed + 1, n_samples=20_000 if fast else 100_000),
        check_timer_equivalence(seed=seed + 2, events=20_000 if fast else 100_000),
        check_leave_one_out(seed=seed + 4, n_items=100 if fast else 200),
        check_asymptotics_dual_route(),
    ]
    if not fast:
        results.insert(6, check_hoeffding_occupancy(seed=seed + 3))
    return results
