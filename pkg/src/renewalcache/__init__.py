"""Simulation and analysis of local-memory (cache) policies driven by the
stochastic intensities of stationary renewal request processes."""

from .asymptotics import (
    LimitSpec,
    MissEstimate,
    MissMethod,
    asymptotic_miss_probability,
    critical_fraction,
    finite_n_miss_approx,
    g_infinity,
    static_policy_asymptotic_miss,
    theta_star,
)
from .ecdf import EmpiricalCdf
from .engine import HAVE_COMPILED
from .models import Erlang, Exponential, HazardDirection, InterArrivalModel, Pareto
from .policies import (
    FixedThreshold,
    Lru,
    OptimalCausal,
    PolicyKind,
    Static,
    TtlCache,
    TtlPrefetch,
    threshold_from_capacity,
    timers_from_threshold,
)
from .popularity import IntensityVector, PopularityLimit, zipf_intensities
from .process import RenewalSource, SourceSet, init_stationary
from .sim import SimConfig, SimReport, aggregate, empirical_ghat, run, theta_hat

__version__ = "0.1.0"

__all__ = [
    "EmpiricalCdf",
    "Erlang",
    "Exponential",
    "FixedThreshold",
    "HAVE_COMPILED",
    "HazardDirection",
    "IntensityVector",
    "InterArrivalModel",
    "LimitSpec",
    "Lru",
    "MissEstimate",
    "MissMethod",
    "OptimalCausal",
    "Pareto",
    "PolicyKind",
    "PopularityLimit",
    "RenewalSource",
    "SimConfig",
    "SimReport",
    "SourceSet",
    "Static",
    "TtlCache",
    "TtlPrefetch",
    "aggregate",
    "asymptotic_miss_probability",
    "critical_fraction",
    "empirical_ghat",
    "finite_n_miss_approx",
    "g_infinity",
    "init_stationary",
    "run",
    "static_policy_asymptotic_miss",
    "theta_hat",
    "theta_star",
    "threshold_from_capacity",
    "timers_from_threshold",
    "zipf_intensities",
]
