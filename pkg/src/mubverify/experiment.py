"""End-to-end experiments: simulate trials, derive confidence/infidelity curves, fit scaling.

Output tree of one experiment directory::

    report.json
    ledgers/trial_0000.csv ...   one per trial (simulate)
    curves/trial_0000.csv ...    delta(N) and epsilon(N) per trial (analyze)
    curves/aggregate.csv         mean and stddev across trials (analyze)
    fit.json                     scaling-exponent summary (fit)

Every file is a pure function of the configuration and seed.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .device import (
    NoiseChannel,
    RandomStream,
    build_device,
    pass_probability,
    read_ledger_csv,
    run_copies,
    write_ledger_csv,
)
from .errors import ConfigError, DegenerateFit, DomainError, LedgerFormatError, MubVerifyError
from .mub import build_mub, build_strategy
from .stats import (
    STANDARD_QUANTUM_LIMIT,
    aggregate_slopes,
    aggregate_trials,
    confidence_curve,
    epsilon_curve,
    fit_scaling,
    slope_sigma_excess,
    window_mask,
)

DENSE_GRID_LIMIT = 2000
GRID_RATIO = 1.05
MIN_FIT_TRIALS = 3
FLAT_SLOPE = 0.1
CURVE_COLUMNS = ("n", "m", "pass_rate", "delta", "ln_delta", "epsilon")
CURVE_QUANTITIES = ("pass_rate", "delta", "ln_delta", "epsilon")


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 3
    coefficients: tuple = None
    noise: NoiseChannel = field(default_factory=lambda: NoiseChannel.white())
    n_copies: int = 5000
    n_trials: int = 300
    seed: int = 0
    epsilon: float = 0.08
    delta: float = 0.05
    fit_window: tuple = None
    output_dir: str = "out"
    jobs: int = 1

    def validate(self):
        from .mub import SUPPORTED_DIMENSIONS

        if self.d not in SUPPORTED_DIMENSIONS:
            raise ConfigError("d", f"unsupported dimension {self.d}")
        if self.coefficients is not None and len(self.coefficients) != self.d:
            raise ConfigError("coefficients", f"need {self.d} values, got {len(self.coefficients)}")
        if self.coefficients is not None and not any(self.coefficients):
            raise ConfigError("coefficients", "all coefficients are zero")
        if self.n_copies < 1:
            raise ConfigError("n_copies", "must be at least 1")
        if self.n_trials < 1:
            raise ConfigError("n_trials", "must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        for name in ("epsilon", "delta"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(name, "must lie in (0, 1)")
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not 1 <= lo < hi:
                raise ConfigError("fit_window", "need 1 <= n_low < n_high")
        return self

    def echo(self):
        """Config as JSON-ready dict; output_dir and jobs are left out so that
        the report does not depend on where or how parallel it was run."""
        return {
            "d": self.d,
            "coefficients": None
            if self.coefficients is None
            else [[c.real, c.imag] for c in map(complex, self.coefficients)],
            "noise": str(self.noise),
            "n_copies": self.n_copies,
            "n_trials": self.n_trials,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "fit_window": None if self.fit_window is None else list(self.fit_window),
        }


def parse_window(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError(f"window must look like nlow:nhigh, got {text!r}")
    return int(lo), int(hi)


_PARSERS = {
    "d": int,
    "coefficients": lambda s: tuple(complex(tok.replace(" ", "")) for tok in s.split(",")),
    "noise": NoiseChannel.parse,
    "n_copies": int,
    "n_trials": int,
    "seed": int,
    "epsilon": float,
    "delta": float,
    "fit_window": parse_window,
    "output_dir": str,
    "jobs": int,
}


def parse_settings(pairs, base=None):
    """Apply ``{key: text}`` settings on top of ``base`` (default config)."""
    values = {}
    for key, text in pairs.items():
        if key not in _PARSERS:
            raise ConfigError(key, "unknown setting")
        try:
            values[key] = _PARSERS[key](text) if isinstance(text, str) else text
        except (ValueError, DomainError) as exc:
            raise ConfigError(key, str(exc)) from None
    return replace(base or ExperimentConfig(), **values).validate()


def load_config(path, overrides=None):
    """Read a ``key = value`` file (``#`` comments); ``overrides`` win."""
    pairs = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {line_no}", f"expected key = value, got {raw!r}")
        pairs[key.strip()] = value.strip()
    pairs.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return parse_settings(pairs)


def analysis_grid(n_max):
    """Every N up to DENSE_GRID_LIMIT, then a geometric grid (ratio 1.05) up to n_max."""
    grid = list(range(1, min(n_max, DENSE_GRID_LIMIT) + 1))
    n = grid[-1]
    while n < n_max:
        n = min(n_max, max(n + 1, math.ceil(n * GRID_RATIO)))
        grid.append(n)
    return np.array(grid, dtype=np.int64)


@dataclass
class TrialCurve:
    n: np.ndarray
    m: np.ndarray
    pass_rate: np.ndarray
    delta: np.ndarray
    ln_delta: np.ndarray
    epsilon: np.ndarray

    @property
    def final_pass_rate(self):
        return float(self.m[-1] / self.n[-1])


def curve_from_passes(cumulative, epsilon, delta, lambda2, grid=None):
    """delta(N) at fixed epsilon and epsilon(N) at fixed delta on the analysis grid."""
    cumulative = np.asarray(cumulative, dtype=np.int64)
    n = analysis_grid(len(cumulative)) if grid is None else np.asarray(grid, dtype=np.int64)
    m = cumulative[n - 1]
    conf = confidence_curve(n, m, epsilon, lambda2)
    return TrialCurve(
        n=n,
        m=m,
        pass_rate=m / n,
        delta=conf,
        ln_delta=np.log(conf),
        epsilon=epsilon_curve(n, m, delta, lambda2),
    )


@dataclass
class FitSummary:
    slope: float
    slope_stderr: float
    intercept: float
    window: tuple
    sigma_excess: float
    sigma_source: str
    regression: dict
    per_trial: list
    warnings: list

    def to_json(self):
        return {
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "intercept": self.intercept,
            "window": list(self.window),
            "sigma_excess": self.sigma_excess,
            "sigma_source": self.sigma_source,
            "bound": STANDARD_QUANTUM_LIMIT,
            "n_trials": len(self.per_trial),
            "regression": self.regression,
            "per_trial": self.per_trial,
            "warnings": self.warnings,
        }


def _fit_one(n, eps, final_pass_rate, lambda2, window):
    if window is None:
        keep = window_mask(n, eps, final_pass_rate, lambda2)
        return fit_scaling(np.column_stack([n[keep], eps[keep]]))
    return fit_scaling(np.column_stack([n, eps]), window)


def fit_curves(curves, lambda2, window=None) -> FitSummary:
    """Per-trial scaling fits, summarized as mean slope +- stddev across trials."""
    if len(curves) < MIN_FIT_TRIALS:
        raise DegenerateFit(f"need at least {MIN_FIT_TRIALS} trials, got {len(curves)}")
    fits = []
    for t, c in enumerate(curves):
        try:
            fits.append(_fit_one(c.n, c.epsilon, c.final_pass_rate, lambda2, window))
        except DegenerateFit as exc:
            raise DegenerateFit(f"trial {t}: {exc}") from None
    slope, spread = aggregate_slopes([f.slope for f in fits])
    intercept = float(np.mean([f.intercept for f in fits]))

    grid, mean_eps, _ = aggregate_trials([(c.n, c.epsilon) for c in curves])
    _, mean_rate, _ = aggregate_trials([(c.n, c.pass_rate) for c in curves])
    pooled = _fit_one(grid, mean_eps, float(mean_rate[-1]), lambda2, window)

    if spread > 0:
        sigma_source, err = "trials", spread
    else:
        sigma_source, err = "regression", pooled.slope_stderr
    sigma_excess = slope_sigma_excess(slope, err) if err > 0 else 0.0

    warnings = []
    if abs(slope) < FLAT_SLOPE:
        warnings.append("window excludes linear regime")
    span = (min(f.fit_window[0] for f in fits), max(f.fit_window[1] for f in fits))
    return FitSummary(
        slope=slope,
        slope_stderr=spread,
        intercept=intercept,
        window=tuple(window) if window is not None else span,
        sigma_excess=sigma_excess,
        sigma_source=sigma_source,
        regression={
            "slope": pooled.slope,
            "slope_stderr": pooled.slope_stderr,
            "intercept": pooled.intercept,
            "window": list(pooled.fit_window),
        },
        per_trial=[
            {"slope": f.slope, "slope_stderr": f.slope_stderr, "intercept": f.intercept, "window": list(f.fit_window)}
            for f in fits
        ],
        warnings=warnings,
    )


# ---------------------------------------------------------------- file formats


def fmt_real(x):
    x = float(x)
    return "nan" if math.isnan(x) else f"{x:.17g}"


def write_curve_csv(curve: TrialCurve, path):
    cols = [curve.n, curve.m, curve.pass_rate, curve.delta, curve.ln_delta, curve.epsilon]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CURVE_COLUMNS) + "\n")
        for n, m, *reals in zip(*(c.tolist() for c in cols)):
            fh.write(f"{n},{m}," + ",".join(fmt_real(x) for x in reals) + "\n")


def read_curve_csv(path) -> TrialCurve:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or tuple(lines[0].split(",")) != CURVE_COLUMNS:
        raise LedgerFormatError(path, 1, f"expected header {','.join(CURVE_COLUMNS)}")
    ints, reals = [], []
    for row_no, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(CURVE_COLUMNS):
            raise LedgerFormatError(path, row_no, f"expected {len(CURVE_COLUMNS)} fields")
        try:
            ints.append((int(fields[0]), int(fields[1])))
            reals.append([float(x) for x in fields[2:]])
        except ValueError:
            raise LedgerFormatError(path, row_no, "unparseable number") from None
    if len(ints) == 0:
        raise LedgerFormatError(path, 2, "curve has no rows")
    ints = np.array(ints, dtype=np.int64)
    reals = np.array(reals, dtype=np.float64)
    return TrialCurve(ints[:, 0], ints[:, 1], *reals.T)


def write_aggregate_csv(curves, path):
    header = ["n"] + [f"{q}_{s}" for q in CURVE_QUANTITIES for s in ("mean", "stddev")]
    columns = []
    grid = None
    for q in CURVE_QUANTITIES:
        grid, mean, std = aggregate_trials([(c.n, getattr(c, q)) for c in curves])
        columns += [mean, std]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i, n in enumerate(grid.tolist()):
            fh.write(f"{n}," + ",".join(fmt_real(col[i]) for col in columns) + "\n")


def write_json(doc, path):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def trial_name(t):
    return f"trial_{t:04d}.csv"


# ---------------------------------------------------------------- pipeline


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    lambda2: float
    delta_coefficient: float
    pass_probability: float
    ledger_files: list
    curve_files: list = field(default_factory=list)
    aggregate_file: str = None
    fit: dict = None
    duration_s: float = 0.0

    def to_json(self):
        """On-disk form; the wall-clock duration is deliberately omitted."""
        doc = {
            "config": self.config.echo(),
            "strategy": {"lambda2": self.lambda2, "delta_coefficient": self.delta_coefficient},
            "pass_probability": self.pass_probability,
            "ledgers": self.ledger_files,
        }
        if self.curve_files:
            doc["curves"] = {"trials": self.curve_files, "aggregate": self.aggregate_file}
        if self.fit is not None:
            doc["fit"] = self.fit
        return doc


def simulate_trials(config: ExperimentConfig):
    """Run every trial in memory. Returns (strategy, device, ledgers)."""
    strategy = build_strategy(build_mub(config.d))
    device = build_device(config.d, config.coefficients, config.noise)

    def one(t):
        return run_copies(device, strategy, config.n_copies, RandomStream(config.seed, t))

    if config.jobs > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            ledgers = list(pool.map(one, range(config.n_trials)))
    else:
        ledgers = [one(t) for t in range(config.n_trials)]
    return strategy, device, ledgers


def _ensure_dir(path):
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOError(f"cannot create {path}: {exc}") from exc


def simulate(config: ExperimentConfig) -> ExperimentReport:
    start = time.perf_counter()
    config.validate()
    out = Path(config.output_dir)
    _ensure_dir(out / "ledgers")
    strategy, device, ledgers = simulate_trials(config)
    files = []
    for t, ledger in enumerate(ledgers):
        rel = f"ledgers/{trial_name(t)}"
        write_ledger_csv(ledger, out / rel)
        files.append(rel)
    report = ExperimentReport(
        config=config,
        lambda2=strategy.lambda2,
        delta_coefficient=strategy.delta_coefficient,
        pass_probability=pass_probability(device, strategy),
        ledger_files=files,
    )
    write_json(report.to_json(), out / "report.json")
    report.duration_s = time.perf_counter() - start
    return report


def _load_report(directory):
    path = Path(directory) / "report.json"
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return None


def _lambda2_for(directory, d):
    report = _load_report(directory)
    if report is not None:
        return float(report["strategy"]["lambda2"]), int(report["config"]["d"]), report
    if d is None:
        raise MubVerifyError(f"{directory} has no report.json; pass the dimension explicitly")
    return build_strategy(build_mub(d)).lambda2, d, None


def analyze(directory, epsilon, delta, d=None):
    """Curves for every ledger under ``directory``; returns the in-memory curves."""
    directory = Path(directory)
    lambda2, d, report = _lambda2_for(directory, d)
    ledger_dir = directory / "ledgers" if (directory / "ledgers").is_dir() else directory
    paths = sorted(ledger_dir.glob("trial_*.csv"))
    if not paths:
        raise LedgerFormatError(ledger_dir, 0, "no trial_*.csv ledgers found")
    ledgers = [read_ledger_csv(p, d) for p in paths]
    if len({led.n for led in ledgers}) != 1:
        raise LedgerFormatError(ledger_dir, 0, "ledgers have different lengths")
    curves = [curve_from_passes(led.cumulative, epsilon, delta, lambda2) for led in ledgers]

    out = directory / "curves"
    _ensure_dir(out)
    names = []
    for p, curve in zip(paths, curves):
        write_curve_csv(curve, out / p.name)
        names.append(f"curves/{p.name}")
    write_aggregate_csv(curves, out / "aggregate.csv")
    if report is not None:
        report["analysis"] = {"epsilon": epsilon, "delta": delta}
        report["curves"] = {"trials": names, "aggregate": "curves/aggregate.csv"}
        write_json(report, directory / "report.json")
    return curves


def load_curves(directory):
    directory = Path(directory)
    curve_dir = directory / "curves" if (directory / "curves").is_dir() else directory
    paths = sorted(curve_dir.glob("trial_*.csv"))
    return [read_curve_csv(p) for p in paths]


def fit(directory, window=None, d=None) -> FitSummary:
    directory = Path(directory)
    lambda2, _, report = _lambda2_for(directory, d)
    summary = fit_curves(load_curves(directory), lambda2, window)
    doc = summary.to_json()
    write_json(doc, directory / "fit.json")
    if report is not None:
        report["fit"] = "fit.json"
        write_json(report, directory / "report.json")
    return summary


def run_experiment(config: ExperimentConfig):
    """simulate, analyze and fit in one go; returns (report, curves, fit summary)."""
    report = simulate(config)
    start = time.perf_counter() - report.duration_s
    curves = analyze(config.output_dir, config.epsilon, config.delta)
    summary = None
    if config.n_trials >= MIN_FIT_TRIALS:
        summary = fit(config.output_dir, config.fit_window)
        report.fit = summary.to_json()
    report.curve_files = [f"curves/{trial_name(t)}" for t in range(config.n_trials)]
    report.aggregate_file = "curves/aggregate.csv"
    report.duration_s = time.perf_counter() - start
    return report, curves, summary

