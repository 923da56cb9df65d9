"""Configuration-driven experiment harness.

Each experiment kind wires the library modules into a reproducible
pipeline: outputs are CSV files plus a JSON report that embeds the config,
and report bytes are a pure function of config bytes (seeds included).
"""

from __future__ import annotations

import csv
import json
import math
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy.linalg

from . import bounds as bnd
from .fbm import estimate_garsia, lift_fbm, sample_fbm
from .path_signature import (
    PiecewiseLinearPath,
    dyadic_times,
    holder_constant,
    path_signature,
)
from .taylor_solver import bound_truncation, stopping_time, taylor_evaluate
from .tensor_algebra import words_of_length
from .vector_fields import PolyVectorField, fit_growth, taylor_coefficients

__all__ = ["ExperimentConfig", "Report", "load_config", "validate", "run"]

SCHEMA_VERSION = "roughtaylor-report-1"
OUTPUT_DIR_ENV = "ROUGHTAYLOR_OUT"
KINDS = (
    "fbm-sample",
    "signature",
    "taylor-converge",
    "bounds-check",
    "garsia",
    "stopping-time",
)
STOCHASTIC_KINDS = ("fbm-sample", "bounds-check", "garsia")


@dataclass
class ExperimentConfig:
    kind: str
    parameters: dict[str, Any]
    output_dir: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": self.parameters,
            "output_dir": self.output_dir,
        }


@dataclass
class Report:
    schema_version: str
    config: dict
    records: list[dict] = field(default_factory=list)
    aggregates: dict[str, Any] = field(default_factory=dict)
    violations: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and not self.errors

    def write(self, path: str) -> None:
        doc = {
            "schema_version": self.schema_version,
            "config": self.config,
            "records": self.records,
            "aggregates": self.aggregates,
            "violations": self.violations,
            "errors": self.errors,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")


def load_config(path: str, output_dir: str | None = None) -> ExperimentConfig:
    """Load a JSON (or TOML, normalized to the same shape) config file."""
    p = Path(path)
    if p.suffix == ".toml":
        with open(p, "rb") as fh:
            doc = tomllib.load(fh)
    else:
        with open(p) as fh:
            doc = json.load(fh)
    out = output_dir or doc.get("output_dir") or os.environ.get(OUTPUT_DIR_ENV, ".")
    return ExperimentConfig(
        kind=doc.get("kind", ""),
        parameters=doc.get("parameters", {}),
        output_dir=str(out),
    )


def _beta_ok(beta) -> bool:
    return isinstance(beta, (int, float)) and 1.0 / 3.0 < beta < 0.5


def validate(config: ExperimentConfig) -> list[str]:
    """All constraint violations, each naming the offending field."""
    problems: list[str] = []
    if config.kind not in KINDS:
        problems.append(f"kind: unknown kind {config.kind!r}; expected one of {KINDS}")
        return problems
    p = config.parameters
    if config.kind in STOCHASTIC_KINDS:
        seeds = p.get("seeds")
        if not isinstance(seeds, list) or not seeds:
            problems.append("parameters.seeds: seed list must be non-empty")
    if config.kind in ("fbm-sample", "bounds-check", "garsia"):
        hurst = p.get("hurst")
        if not isinstance(hurst, (int, float)) or not 0 < hurst < 1:
            problems.append("parameters.hurst: must lie in (0, 1)")
    if config.kind in ("taylor-converge", "bounds-check", "garsia", "stopping-time"):
        if not _beta_ok(p.get("beta")):
            problems.append("parameters.beta: beta must lie in (1/3, 1/2)")
    if config.kind in ("taylor-converge", "stopping-time"):
        grid = p.get("gamma_grid")
        if not isinstance(grid, list) or not grid:
            problems.append("parameters.gamma_grid: must be a non-empty list")
        elif _beta_ok(p.get("beta")) and any(
            not (0 < g < p["beta"]) for g in grid
        ):
            problems.append("parameters.gamma_grid: gamma must be < beta (and > 0)")
    if config.kind == "garsia":
        hurst, beta, pp = p.get("hurst"), p.get("beta"), p.get("p")
        if (
            isinstance(hurst, (int, float))
            and isinstance(beta, (int, float))
            and isinstance(pp, (int, float))
            and 0 < beta < hurst < 1
            and pp <= 1.0 / (2.0 * (hurst - beta))
        ):
            problems.append(
                "parameters.p: must exceed 1/(2(H-beta)) or E[U^p] diverges"
            )
    if config.kind == "fbm-sample":
        n = p.get("n")
        if not isinstance(n, int) or n < 1 or n > 4096:
            problems.append("parameters.n: must be an integer in 1..4096")
    if config.kind == "stopping-time":
        if not isinstance(p.get("r"), (int, float)) or p.get("r", 0) <= 1:
            problems.append("parameters.r: must exceed 1")
        if not isinstance(p.get("c_radius"), (int, float)) or p.get("c_radius", 0) <= 0:
            problems.append("parameters.c_radius: must be positive")
    return problems


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [f"{v:.17g}" if isinstance(v, float) else v for v in row]
            )


def _linear_driver(slope: float, t_end: float, d: int = 1) -> PiecewiseLinearPath:
    times = np.array([0.0, t_end])
    values = np.array([[0.0] * d, [slope * t_end] * d])
    return PiecewiseLinearPath(times, values)


def _run_fbm_sample(config: ExperimentConfig, out: Path, report: Report) -> None:
    p = config.parameters
    t_end = float(p.get("T", 1.0))
    for seed in sorted(p["seeds"]):
        sample = sample_fbm(p["hurst"], t_end, p["n"], p.get("d", 1), seed)
        name = f"fbm_{seed:08d}.csv"
        sample.to_csv(str(out / name))
        report.records.append(
            {
                "seed": seed,
                "file": name,
                "final_value_l1": float(np.abs(sample.values[-1]).sum()),
            }
        )


def _resolve_driver(p: dict) -> PiecewiseLinearPath:
    driver = p["driver"]
    if "csv" in driver:
        return PiecewiseLinearPath.from_csv(driver["csv"])
    fbm_cfg = driver["fbm"]
    sample = sample_fbm(
        fbm_cfg["hurst"],
        float(fbm_cfg.get("T", 1.0)),
        fbm_cfg["n"],
        fbm_cfg.get("d", 1),
        fbm_cfg["seed"],
    )
    from .fbm import dyadic_interpolation

    return dyadic_interpolation(
        sample, fbm_cfg.get("m", int(math.log2(fbm_cfg["n"])))
    )


def _run_signature(config: ExperimentConfig, out: Path, report: Report) -> None:
    p = config.parameters
    driver = _resolve_driver(p)
    degree = int(p.get("degree", 2))
    s = float(p.get("s", driver.t_start))
    t = float(p.get("t", driver.t_end))
    sig = path_signature(driver, s, t, degree)
    rows = []
    for k in range(1, degree + 1):
        for idx, word in enumerate(words_of_length(driver.dim, k)):
            rows.append([k, ".".join(map(str, word)), float(sig.levels[k][idx])])
    _write_csv(out / "signature.csv", ["level", "word", "value"], rows)
    report.records.append(
        {
            "s": s,
            "t": t,
            "degree": degree,
            "level_norms": [float(np.abs(b).sum()) for b in sig.levels],
        }
    )


def _linear_benchmark(p: dict):
    bench = p["benchmark"]
    t_end = float(bench.get("T", 1.0))
    if bench["type"] == "linear":
        a, x0 = float(bench["a"]), float(bench["x0"])
        fields = PolyVectorField.from_linear([np.array([[a]])])
        x0_vec = np.array([x0])
        exact = lambda dy: np.array([x0 * math.exp(a * dy)])
    elif bench["type"] == "matrix":
        a_mat = np.array(bench["A"], dtype=float)
        x0_vec = np.array(bench["x0"], dtype=float)
        fields = PolyVectorField.from_linear([a_mat])
        exact = lambda dy: scipy.linalg.expm(a_mat * dy) @ x0_vec
    else:
        raise ValueError(f"unknown benchmark type {bench['type']!r}")
    driver = _linear_driver(float(bench["dy"]) / t_end, t_end)
    return fields, x0_vec, driver, exact, float(bench["dy"])


def _run_taylor_converge(config: ExperimentConfig, out: Path, report: Report) -> None:
    p = config.parameters
    beta = float(p["beta"])
    n_max = int(p.get("n_max", 12))
    fields, x0_vec, driver, exact, dy = _linear_benchmark(p)
    table = taylor_coefficients(fields, x0_vec, n_max)
    growth_m, growth_gamma = fit_growth(table, p["gamma_grid"])
    holder_c = holder_constant(driver, dyadic_times(driver.t_end, 8), beta)
    params = bnd.BoundParams.create(
        beta, growth_gamma, holder_c, max(growth_m, 1e-300), driver.t_end
    )
    evaluation = taylor_evaluate(table, driver, driver.t_end, n_max)
    target = exact(dy)
    rows = []
    for n_level in range(1, n_max + 1):
        err = float(np.linalg.norm(evaluation.partial_sums[n_level] - target))
        bound = float(bound_truncation(params, n_level))
        violation = err > bound
        rows.append([n_level, err, bound, int(violation)])
        if violation:
            report.violations += 1
    _write_csv(
        out / "convergence.csv", ["N", "measured_error", "bound", "violation"], rows
    )
    report.aggregates.update(
        {
            "growth_m": growth_m,
            "growth_gamma": growth_gamma,
            "holder_c": holder_c,
            "final_error": rows[-1][1],
        }
    )


def _run_bounds_check(config: ExperimentConfig, out: Path, report: Report) -> None:
    p = config.parameters
    beta = float(p["beta"])
    m = int(p.get("m", 10))
    depth = int(p.get("depth", 8))
    k_max = int(p.get("k_max", 6))
    d = int(p.get("d", 2))
    t_end = float(p.get("T", 1.0))
    rows = []
    for seed in sorted(p["seeds"]):
        sample = sample_fbm(p["hurst"], t_end, 2**m, d, seed)
        lift = lift_fbm(sample, m, beta=beta)
        holder_c = holder_constant(lift, dyadic_times(t_end, depth), beta)
        params = bnd.BoundParams.create(beta, beta / 2, holder_c, 1.0, t_end)
        sig = path_signature(lift.path, 0.0, t_end, k_max)
        for k in range(1, k_max + 1):
            measured = float(np.abs(sig.levels[k]).sum())
            bound = bnd.level_bound(k, params)
            violation = measured > bound
            rows.append([seed, k, measured, bound, int(violation)])
            if violation:
                report.violations += 1
    _write_csv(
        out / "bounds_check.csv",
        ["seed", "k", "measured_norm", "level_bound", "violation"],
        rows,
    )
    report.aggregates["checked_levels"] = len(rows)


def _run_garsia(config: ExperimentConfig, out: Path, report: Report) -> None:
    p = config.parameters
    beta = float(p["beta"])
    m = int(p.get("m", 8))
    depth = int(p.get("depth", 6))
    rows = []
    xis = []
    for seed in sorted(p["seeds"]):
        sample = sample_fbm(p["hurst"], float(p.get("T", 1.0)), 2**m, p.get("d", 1), seed)
        lift = lift_fbm(sample, m, beta=beta)
        est = estimate_garsia(lift, beta, float(p["p"]), depth)
        rows.append(
            [seed, est.u_gamma_p, est.v_gamma_p, est.xi, est.eta, est.c_beta_t]
        )
        xis.append(est.xi)
    _write_csv(
        out / "garsia.csv", ["seed", "U", "V", "xi", "eta", "c_beta_T"], rows
    )
    xis = np.array(xis)
    report.aggregates.update(
        {
            "xi_mean_q1": float(np.mean(xis)),
            "xi_mean_q2": float(np.mean(xis**2)),
            "xi_mean_q4": float(np.mean(xis**4)),
        }
    )


def _run_stopping_time(config: ExperimentConfig, out: Path, report: Report) -> None:
    p = config.parameters
    beta = float(p["beta"])
    a, x0 = float(p["a"]), float(p["x0"])
    slope = float(p["slope"])
    t_end = float(p.get("T", 1.0))
    r = float(p["r"])
    c_radius = float(p["c_radius"])
    n_table = int(p.get("n_table", 30))
    fields = PolyVectorField.from_linear([np.array([[a]])])
    driver = _linear_driver(slope, t_end)
    table = taylor_coefficients(fields, [x0], n_table)
    fit_growth(table, p["gamma_grid"])
    from .path_signature import RoughLift

    lift = RoughLift(path=driver, degree=2, beta=beta)
    lift.holder_const = holder_constant(lift, dyadic_times(t_end, 8), beta)
    computed = stopping_time(table, lift, r, c_radius)
    dy_star = math.log(1.0 + c_radius / (2.0 * x0)) / (r * a)
    analytic = min(dy_star / slope, t_end)
    diff = abs(computed - analytic)
    positive = computed > 0
    if not positive or diff > 1e-6 * t_end:
        report.violations += 1
    _write_csv(
        out / "stopping_time.csv",
        ["computed", "analytic", "abs_diff", "positive"],
        [[computed, analytic, diff, int(positive)]],
    )
    report.aggregates.update(
        {"computed": computed, "analytic": analytic, "abs_diff": diff}
    )


_RUNNERS: dict[str, Callable[[ExperimentConfig, Path, Report], None]] = {
    "fbm-sample": _run_fbm_sample,
    "signature": _run_signature,
    "taylor-converge": _run_taylor_converge,
    "bounds-check": _run_bounds_check,
    "garsia": _run_garsia,
    "stopping-time": _run_stopping_time,
}


def run(config: ExperimentConfig) -> Report:
    """Execute one experiment; writes CSV artifacts plus report.json."""
    problems = validate(config)
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = Report(schema_version=SCHEMA_VERSION, config=config.to_dict())
    try:
        _RUNNERS[config.kind](config, out, report)
    except Exception as exc:  # runtime failures are carried into the report
        report.errors.append(f"{type(exc).__name__}: {exc}")
    report.write(str(out / "report.json"))
    return report
