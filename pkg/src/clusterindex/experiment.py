"""Monte Carlo harness: sliding vs disjoint blocks estimators against oracle
cluster indices and limiting variances."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .estimators import (
    DegenerateThresholdError,
    ansjb_diagnostic,
    dh_diagnostic,
    estimate_disjoint,
    estimate_sliding,
    s_condition_diagnostic,
)
from .functionals import FunctionalSpec, parse_functional
from .oracle import TailProcessModel, cluster_index_mc, limiting_variance
from .series import BlockScheme, SchemeError, order_statistic
from .simulate import ProcessSpec, generate, parse_process

WORKERS_ENV = "CLUSTERINDEX_WORKERS"
MODES = ("sliding", "disjoint")
SIG_DIGITS = 12


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """``process`` is a template: its length and seed are replaced per replication."""

    process: ProcessSpec
    n: int
    r_n: int
    k: int
    functionals: tuple[FunctionalSpec, ...]
    replications: int
    seed: int = 0
    out: str | None = None
    oracle_samples: int = 200_000

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError(f"need at least 2 replications, got {self.replications}")
        if not self.functionals:
            raise ValueError("no functionals configured")
        if not 1 <= self.r_n <= self.n:
            raise SchemeError(f"r_n must be in [1, {self.n}], got {self.r_n}")
        if not 1 <= self.k < self.n:
            raise SchemeError(f"k must satisfy 1 <= k < n, got {self.k}")
        object.__setattr__(self, "functionals", tuple(self.functionals))

    @property
    def scheme(self) -> BlockScheme:
        return BlockScheme(self.n, self.r_n, self.k)

    @property
    def model(self) -> TailProcessModel:
        p = self.process
        return TailProcessModel(p.kind, p.alpha, rho=p.rho, coeffs=p.coeffs)


_CONFIG_KEYS = {"process.kind", "process.alpha", "process.rho", "process.b", "n", "r_n", "k",
                "functionals", "replications", "seed", "out", "oracle.samples"}


def parse_config_text(text: str) -> ExperimentConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq:
            raise ValueError(f"line {lineno}: expected key = value")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value.strip()
    missing = {"process.kind", "n", "r_n", "k", "functionals", "replications"} - set(raw)
    if missing:
        raise ValueError(f"missing keys: {sorted(missing)}")
    kind = raw["process.kind"]
    params = [f"alpha={raw.get('process.alpha', '1')}"]
    if kind == "ar1":
        params.append(f"rho={raw['process.rho']}")
    elif kind == "ma1":
        params.append(f"b={raw['process.b']}")
    n = int(raw["n"])
    return ExperimentConfig(
        process=parse_process(f"{kind}:{','.join(params)}", n=n),
        n=n,
        r_n=int(raw["r_n"]),
        k=int(raw["k"]),
        functionals=tuple(parse_functional(f) for f in raw["functionals"].split(",") if f.strip()),
        replications=int(raw["replications"]),
        seed=int(raw.get("seed", 0)),
        out=raw.get("out"),
        oracle_samples=int(raw.get("oracle.samples", 200_000)),
    )


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


def replication_seed(master: int, index: int) -> int:
    """64-bit seed of replication ``index``, a hash of (master, index)."""
    lo, hi = np.random.SeedSequence([int(master), int(index)]).generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def _replicate(config: ExperimentConfig, index: int) -> tuple[int, bool, list[tuple[float, float]]]:
    spec = config.process.with_(n=config.n, seed=replication_seed(config.seed, index))
    series = generate(spec)
    scheme = config.scheme
    values = []
    try:
        for f in config.functionals:
            sl = estimate_sliding(series, f, scheme)
            if sl.exceedance_count_observed == 0:
                return index, True, []
            dj = estimate_disjoint(series, f, scheme)
            values.append((sl.value, dj.value))
    except DegenerateThresholdError:
        return index, True, []
    return index, False, values


def _replicate_star(args):
    return _replicate(*args)


def _worker_count(workers: int | None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return 1 if workers is None else max(1, int(workers))


def _summary(z: np.ndarray) -> dict:
    r = z.shape[0]
    centred = z - z.mean()
    var = float(centred @ centred / (r - 1))
    m4 = float(np.mean(centred ** 4))
    return {
        "mean": float(z.mean()),
        "mean_stderr": math.sqrt(var / r),
        "variance": var,
        "variance_stderr": math.sqrt(max(m4 - var * var, 0.0) / r),
    }


def _ratio(z_num: np.ndarray, z_den: np.ndarray) -> tuple[float, float]:
    """Variance ratio with a delta-method standard error that accounts for the
    correlation between the two estimators."""
    r = z_num.shape[0]
    a = (z_num - z_num.mean()) ** 2
    b = (z_den - z_den.mean()) ** 2
    if b.sum() == 0:
        return (math.nan if a.sum() == 0 else math.inf), math.nan
    ma, mb = a.mean(), b.mean()
    ratio = ma / mb
    cov = np.cov(np.vstack((a, b)))
    grad = np.array([1 / mb, -ma / mb ** 2])
    return float(ratio), math.sqrt(max(float(grad @ cov @ grad), 0.0) / r)


def _diagnostics(config: ExperimentConfig) -> dict:
    """DH / S / ANSJB tables on the first replication's series, at the
    order-statistic threshold. Reported, not gated on."""
    spec = config.process.with_(n=config.n, seed=replication_seed(config.seed, 0))
    series = generate(spec)
    c = order_statistic(series.norms, config.k).value
    r = config.r_n
    grid = sorted({1, max(1, r // 4), max(1, r // 2), r})
    out: dict = {"threshold": c}
    try:
        out["dh"] = [[k, p] for k, p in dh_diagnostic(series, c, 1.0, 1.0, grid, r)]
        out["s"] = [[m, v] for m, v in s_condition_diagnostic(series, c, 1.0, 1.0, grid, r)]
        out["ansjb"] = [[e, v] for e, v in ansjb_diagnostic(series, c, 1.0, (0.1, 0.5, 1.0), r)]
    except (DegenerateThresholdError, ValueError) as exc:
        out["error"] = str(exc)
    return out


@dataclass
class ExperimentReport:
    config: dict
    replications: int
    degenerate: int
    functionals: list[dict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "replications": self.replications,
            "degenerate": self.degenerate,
            "functionals": self.functionals,
            "diagnostics": self.diagnostics,
        }

    def entry(self, functional: str) -> dict:
        for f in self.functionals:
            if f["functional"] == functional:
                return f
        raise KeyError(functional)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Simulate ``replications`` independent series, apply both estimators and
    summarise sqrt(k)(estimate - nu*) per functional and mode.

    The result depends only on the config: each replication draws from its
    own derived seed and results are reduced in replication order.
    """
    model = config.model
    tasks = [(config, i) for i in range(config.replications)]
    n_workers = _worker_count(workers)
    if n_workers == 1:
        results = [_replicate(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_replicate_star, tasks, chunksize=max(1, len(tasks) // (4 * n_workers))))
    results.sort(key=lambda r: r[0])
    degenerate = sum(1 for _, bad, _ in results if bad)
    if degenerate > 0.01 * config.replications:
        raise ExperimentError(f"{degenerate} of {config.replications} replications had no exceedances")
    good = [vals for _, bad, vals in results if not bad]
    estimates = np.array(good)  # (R, functionals, modes)
    root_k = math.sqrt(config.k)

    entries = []
    for j, f in enumerate(config.functionals):
        nu = cluster_index_mc(model, f, config.oracle_samples, config.seed)
        var = limiting_variance(model, f, config.oracle_samples, config.seed)
        centre = nu.analytic if nu.analytic is not None else nu.estimate
        modes = {}
        z = {}
        for m, mode in enumerate(MODES):
            vals = estimates[:, j, m]
            z[mode] = root_k * (vals - centre)
            modes[mode] = {"estimate_mean": float(vals.mean()), **_summary(z[mode]),
                           "estimates": vals.tolist()}
        ratio, ratio_se = _ratio(z["sliding"], z["disjoint"])
        entries.append({
            "functional": str(f),
            "oracle_nu": centre,
            "oracle_nu_source": "analytic" if nu.analytic is not None else "monte-carlo",
            "oracle_nu_mc": nu.estimate,
            "oracle_nu_stderr": nu.stderr,
            "oracle_sigma2": var.estimate,
            "oracle_sigma2_stderr": var.stderr,
            "oracle_sigma2_analytic": var.analytic,
            "modes": modes,
            "variance_ratio": ratio,
            "variance_ratio_stderr": ratio_se,
        })
    cfg = {
        "process": config.process.describe(),
        "n": config.n,
        "r_n": config.r_n,
        "k": config.k,
        "functionals": [str(f) for f in config.functionals],
        "replications": config.replications,
        "seed": config.seed,
        "oracle_samples": config.oracle_samples,
    }
    return ExperimentReport(cfg, len(good), degenerate, entries, _diagnostics(config))


# -- serialisation -------------------------------------------------------------

def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None if math.isnan(obj) else str(obj)
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return obj


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


CSV_COLUMNS = ("functional", "mode", "oracle_nu", "oracle_sigma2", "oracle_sigma2_stderr",
               "estimate_mean", "mean", "mean_stderr", "variance", "variance_stderr",
               "variance_ratio", "variance_ratio_stderr", "replications")


def report_json(report: ExperimentReport) -> str:
    return json.dumps(_round(report.to_dict()), indent=2) + "\n"


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for f in report.functionals:
        for mode in MODES:
            s = f["modes"][mode]
            writer.writerow([_fmt(v) for v in (
                f["functional"], mode, f["oracle_nu"], f["oracle_sigma2"], f["oracle_sigma2_stderr"],
                s["estimate_mean"], s["mean"], s["mean_stderr"], s["variance"], s["variance_stderr"],
                f["variance_ratio"], f["variance_ratio_stderr"], report.replications)])
    return buf.getvalue()


def emit_report(report: ExperimentReport, path, format: str = "json") -> Path:
    """Write the report as JSON or CSV with 12 significant digits and a fixed
    field order."""
    if format == "json":
        text = report_json(report)
    elif format == "csv":
        text = report_csv(report)
    else:
        raise ValueError(f"format must be 'json' or 'csv', got {format!r}")
    path = Path(path)
    path.write_text(text)
    return path
