"""Batch command line front-end.

Subcommands:

* ``analyze``   -- analytic curves (threshold, asymptotic / finite-N / static
                   miss) over a beta grid
* ``simulate``  -- seeded simulations over (policy, beta, N) grids
* ``sweep``     -- synonym for ``simulate`` (the grid form is the same)
* ``validate``  -- run the built-in health checks

Configuration comes from a JSON document (``--config``); command-line flags
override individual fields.  Tables are written in a fixed long format
(experiment_id, policy, model, model_param, beta, N, c, metric, value,
stderr) so sweeps concatenate cleanly.  Output files contain no timings or
timestamps: a rerun with the same seed is byte-identical.  Runtimes go to
the log (stderr) instead.

Exit codes: 0 success, 2 configuration error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

import numpy as np

from . import policies as pol
from . import sim, validate
from .asymptotics import (
    LimitSpec,
    asymptotic_miss_probability,
    finite_n_miss_approx,
    static_policy_asymptotic_miss,
    theta_star,
)
from .models import Erlang, Exponential, HazardDirection, Pareto
from .popularity import zipf_intensities

log = logging.getLogger("renewalcache")

CSV_COLUMNS = ["experiment_id", "policy", "model", "model_param", "beta", "N", "c", "metric", "value", "stderr"]

POLICY_NAMES = ("optimal", "threshold", "static", "lru", "ttl_cache", "ttl_prefetch")


class ConfigError(ValueError):
    pass


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise ConfigError(f"config field '{field}': {message}")


def parse_model(spec):
    _require(isinstance(spec, dict) and "family" in spec, "model", "expected {'family': ...}")
    family = spec["family"]
    if family == "pareto":
        alpha = spec.get("alpha")
        _require(isinstance(alpha, (int, float)) and alpha > 1, "model.alpha", "need a number > 1")
        return Pareto(float(alpha))
    if family == "erlang":
        k = spec.get("k")
        _require(isinstance(k, int) and k >= 1, "model.k", "need an integer >= 1")
        return Erlang(k)
    if family == "exponential":
        return Exponential()
    raise ConfigError(f"config field 'model.family': unknown family {family!r}")


def parse_grid(value, field: str) -> list[float]:
    """A number, a list of numbers, or 'start:step:stop' (inclusive)."""
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, list) and value and all(isinstance(v, (int, float)) for v in value):
        return [float(v) for v in value]
    if isinstance(value, str):
        parts = value.split(":")
        _require(len(parts) == 3, field, "grid string must be start:step:stop")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"config field '{field}': {exc}") from None
        _require(step > 0 and stop >= start, field, "need step > 0 and stop >= start")
        n = int(round((stop - start) / step))
        grid = [start + i * step for i in range(n + 1)]
        return [round(g, 12) for g in grid if g <= stop + 1e-12]
    raise ConfigError(f"config field '{field}': expected number, list, or start:step:stop")


def model_columns(model) -> tuple[str, str]:
    if isinstance(model, Pareto):
        return "pareto", repr(model.shape)
    if isinstance(model, Erlang):
        return "erlang", str(model.stages)
    return "exponential", ""


def build_policy(name: str, explicit_theta, model, beta: float, n_items: int, capacity: int):
    iv = zipf_intensities(n_items, beta)
    if name == "optimal":
        return pol.OptimalCausal(capacity)
    if name == "static":
        return pol.Static(capacity)
    if name == "lru":
        return pol.Lru(capacity)
    theta = float(explicit_theta) if explicit_theta is not None else pol.threshold_from_capacity(iv, model, capacity)
    if name == "threshold":
        return pol.FixedThreshold(theta)
    _require(model.hazard_direction is not HazardDirection.CONSTANT, "policies",
             f"{name} needs a non-constant hazard (timer has no equivalent)")
    timers = pol.timers_from_threshold(iv, model, theta)
    if name == "ttl_cache":
        return pol.TtlCache(timers)
    if name == "ttl_prefetch":
        return pol.TtlPrefetch(timers)
    raise ConfigError(f"config field 'policies': unknown policy {name!r}")


def load_config(args) -> dict:
    config = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        _require(isinstance(config, dict), "<root>", "config must be a JSON object")
    if args.seed is not None:
        config["seed"] = args.seed
    if args.out is not None:
        config["out"] = args.out
    if getattr(args, "format", None):
        config["format"] = args.format
    if getattr(args, "workers", None):
        config["workers"] = args.workers
    config.setdefault("experiment_id", "experiment")
    config.setdefault("seed", 0)
    config.setdefault("format", "csv")
    _require(config["format"] in ("csv", "json"), "format", "must be csv or json")
    return config


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def emit(config: dict, rows, extra=None) -> None:
    for row in rows:
        for key in ("value", "stderr"):
            v = row.get(key)
            if isinstance(v, float) and not np.isfinite(v):
                row[key] = ""
    if config["format"] == "json":
        doc = {"columns": CSV_COLUMNS, "rows": rows}
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = rows_to_csv(rows)
    out = config.get("out")
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def make_row(config, policy, model, beta, n, metric, value, stderr=float("nan")):
    family, param = model_columns(model)
    return {
        "experiment_id": config["experiment_id"],
        "policy": policy,
        "model": family,
        "model_param": param,
        "beta": repr(float(beta)),
        "N": "" if n is None else int(n),
        "c": repr(float(config["c"])),
        "metric": metric,
        "value": repr(float(value)),
        "stderr": "" if not np.isfinite(stderr) else repr(float(stderr)),
    }


def cmd_analyze(config: dict) -> int:
    model = parse_model(config.get("model"))
    _require("c" in config, "c", "storage fraction is required")
    c = float(config["c"])
    _require(0 < c <= 1, "c", "must be in (0, 1]")
    betas = parse_grid(config.get("beta", 0.0), "beta")
    n_grid = parse_grid(config["n"], "n") if "n" in config else []
    started = time.perf_counter()
    rows = []
    for beta in betas:
        spec = LimitSpec(model, beta, c)
        rows.append(make_row(config, "optimal", model, beta, None, "theta_star", theta_star(spec)))
        rows.append(make_row(config, "optimal", model, beta, None, "miss_asymptotic",
                             asymptotic_miss_probability(spec).value))
        if beta < 1:
            rows.append(make_row(config, "static", model, beta, None, "miss_static",
                                 static_policy_asymptotic_miss(beta, c)))
        for n in n_grid:
            approx = finite_n_miss_approx(spec, zipf_intensities(int(n), beta))
            rows.append(make_row(config, "optimal", model, beta, int(n), "miss_finite_n", approx.value))
    log.info("analyze: %d rows in %.2fs", len(rows), time.perf_counter() - started)
    emit(config, rows)
    return 0


def _report_payload(report: sim.SimReport) -> dict:
    payload = {
        "miss_probability": report.miss_probability,
        "miss_probability_stderr": None if not np.isfinite(report.miss_probability_stderr) else report.miss_probability_stderr,
        "miss_rate_per_time": report.miss_rate_per_time,
        "arrival_rate_empirical": report.arrival_rate_empirical,
        "events_counted": report.events_counted,
        "per_item_arrivals": report.arrivals.tolist(),
        "per_item_misses": report.misses.tolist(),
        "threshold_trace": {
            "times": report.trace_times.tolist(),
            "theta": report.trace_theta.tolist(),
        },
        "occupancy": report.occupancy.tolist(),
        "ghat_snapshots": [
            {"time": t, "values": ecdf.values.tolist()} for t, ecdf in report.ghat_snapshots
        ],
    }
    return payload


def cmd_simulate(config: dict) -> int:
    model = parse_model(config.get("model"))
    _require("c" in config, "c", "storage fraction is required")
    c = float(config["c"])
    betas = parse_grid(config.get("beta", 0.0), "beta")
    _require("n" in config, "n", "catalog size is required")
    n_grid = [int(v) for v in parse_grid(config["n"], "n")]
    policy_names = config.get("policies", ["optimal"])
    _require(isinstance(policy_names, list) and policy_names, "policies", "need a nonempty list")
    horizon = int(config.get("horizon_events", 200_000))
    warmup = config.get("warmup_events")
    replications = int(config.get("replications", 1))
    workers = int(config.get("workers", 1))
    want_report = bool(config.get("report", False))
    snapshot_times = config.get("snapshot_times", [])
    occupancy_samples = int(config.get("occupancy_samples", 0))

    report_path = config.get("report_path")
    want_report = want_report or bool(report_path)

    rows, reports = [], []
    for beta in betas:
        for n in n_grid:
            capacity = int(round(c * n))
            _require(capacity >= 1, "c", f"capacity round(c*N) must be >= 1 (N={n})")
            for name in policy_names:
                theta = None
                if isinstance(name, dict):
                    theta = name.get("theta")
                    name = name.get("name")
                _require(name in POLICY_NAMES, "policies", f"unknown policy {name!r}")
                policy = build_policy(name, theta, model, beta, n, capacity)
                cfg = sim.SimConfig(
                    model=model, beta=beta, n_items=n, c=c, policy=policy,
                    horizon_events=horizon, warmup_events=warmup,
                    master_seed=int(config["seed"]), replications=replications,
                    snapshot_times=tuple(snapshot_times),
                    occupancy_samples=occupancy_samples,
                )
                try:
                    cfg.validate()
                except sim.InvalidConfig as exc:
                    raise ConfigError(str(exc)) from None
                started = time.perf_counter()
                report = sim.run(cfg, workers=workers)
                log.info("simulate %s beta=%g N=%d: miss=%.5f (%.2fs)",
                         name, beta, n, report.miss_probability, time.perf_counter() - started)
                rows.append(make_row(config, name, model, beta, n, "miss_probability",
                                     report.miss_probability, report.miss_probability_stderr))
                if want_report:
                    payload = _report_payload(report)
                    payload.update({"policy": name, "beta": beta, "N": n})
                    reports.append(payload)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump({"reports": reports}, fh, indent=2, sort_keys=True)
        log.info("wrote %s", report_path)
    emit(config, rows, extra={"reports": reports} if want_report else None)
    return 0


def cmd_validate(config: dict) -> int:
    results = validate.run_checks(seed=int(config["seed"]), fast=bool(config.get("fast", False)))
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="renewalcache", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "simulate", "sweep", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--print-config", action="store_true", help="echo the resolved config and exit")
        if name in ("simulate", "sweep"):
            p.add_argument("--workers", type=int, default=None, help="parallel replication workers")
        if name == "validate":
            p.add_argument("--fast", action="store_true", help="smaller sample sizes")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if getattr(args, "fast", False):
            config["fast"] = True
        if args.print_config:
            json.dump(config, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
            return 0
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command in ("simulate", "sweep"):
            return cmd_simulate(config)
        return cmd_validate(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
