"""Monte Carlo identification experiments and generator reliability statistics.

Each replication generates two source networks, fuses them at a designed
discontinuity D, computes the five metrics and records D's rank under each.
The identification probability for (size, metric, k) is the fraction of
successful replications in which D ranks within the top k.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import optimize, stats

from .convergence import ConvergenceConfig, combine
from .graph import CitationNetwork, DomainTag
from .metrics import METRICS, analyze_network
from .netgen import ConfigError, GenerationConfig, generate

logger = logging.getLogger(__name__)

PROFILES = ("quick", "full")
QUICK_LARGE_SIZE = 10_000
QUICK_LARGE_REPS = 20


@dataclass
class DistributionStats:
    growth_rate: Optional[float] = None
    rank_slope: Optional[float] = None
    lag_histogram: dict[int, int] = field(default_factory=dict)
    lag_mode: Optional[int] = None
    mean_backward_by_year: dict[int, float] = field(default_factory=dict)
    backward_trend_rho: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lag_histogram"] = {str(k): v for k, v in self.lag_histogram.items()}
        d["mean_backward_by_year"] = {str(k): v for k, v in self.mean_backward_by_year.items()}
        return d


def _growth_curve(t, a, r, b):
    return a * np.exp(r * t) + b


def fit_growth_rate(yearly: dict[int, int]) -> Optional[float]:
    """Rate ``r`` of a least-squares fit of ``a * exp(r t) + b`` to yearly counts."""
    if len(yearly) < 4:
        return None
    t = np.array(sorted(yearly), dtype=float)
    y = np.array([yearly[int(x)] for x in t], dtype=float)
    if not y.any():
        return None
    # Start from a pure exponential through the last point.
    r0 = 0.05
    a0 = max(y[-1], 1.0) / math.exp(r0 * t[-1])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", optimize.OptimizeWarning)
            popt, _ = optimize.curve_fit(_growth_curve, t, y, p0=(a0, r0, 0.0), maxfev=20_000)
    except (RuntimeError, ValueError):
        return None
    return float(popt[1])


def rank_slope(fwdcit: list[int]) -> Optional[float]:
    """Log-log slope of forward citations against rank over the top half, zeros excluded."""
    counts = sorted((c for c in fwdcit if c > 0), reverse=True)
    counts = counts[: max(len(fwdcit) // 2, 0)]
    if len(counts) < 3:
        return None
    ranks = np.arange(1, len(counts) + 1, dtype=float)
    slope = stats.linregress(np.log(ranks), np.log(np.array(counts, dtype=float))).slope
    return float(slope)


def reliability_stats(net: CitationNetwork, min_year_patents: int = 5) -> DistributionStats:
    """Growth, power-law, lag and backward-citation statistics of a network."""
    out = DistributionStats()
    if len(net) == 0:
        return out
    yearly: dict[int, int] = {}
    for y in net.years:
        yearly[y] = yearly.get(y, 0) + 1
    full = {y: yearly.get(y, 0) for y in range(net.min_year, net.max_year + 1)}
    out.growth_rate = fit_growth_rate(full)
    out.rank_slope = rank_slope([len(f) for f in net.forward])

    lags: dict[int, int] = {}
    for u, succ in enumerate(net.forward):
        for v in succ:
            lag = net.years[v] - net.years[u]
            lags[lag] = lags.get(lag, 0) + 1
    out.lag_histogram = dict(sorted(lags.items()))
    if lags:
        out.lag_mode = min(lags, key=lambda x: (-lags[x], x))

    sums: dict[int, int] = {}
    for i, y in enumerate(net.years):
        sums[y] = sums.get(y, 0) + len(net.backward[i])
    out.mean_backward_by_year = {y: sums[y] / yearly[y] for y in sorted(yearly)}
    eligible = [y for y in sorted(yearly) if yearly[y] >= min_year_patents]
    if len(eligible) >= 3:
        vals = [out.mean_backward_by_year[y] for y in eligible]
        if len(set(vals)) > 1:
            out.backward_trend_rho = float(stats.spearmanr(eligible, vals).statistic)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    sizes: tuple[int, ...] = (600, 1000, 2000, 10000, 30000)
    replications: int = 100
    top_k_groups: tuple[int, ...] = (1, 3, 5, 10, 30, 50)
    master_seed: int = 0
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    convergence: ConvergenceConfig = field(default_factory=ConvergenceConfig)
    tau: float = 0.5
    profile: str = "full"
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if not self.sizes:
            raise ConfigError("sizes", "must be non-empty")
        if any(not isinstance(s, int) or s < 2 for s in self.sizes):
            raise ConfigError("sizes", "every size must be an integer >= 2")
        if len(set(self.sizes)) != len(self.sizes):
            raise ConfigError("sizes", "duplicate sizes")
        if self.replications < 1:
            raise ConfigError("replications", "must be >= 1")
        if not self.top_k_groups or any(k < 1 for k in self.top_k_groups):
            raise ConfigError("top_k_groups", "need positive k values")
        if self.profile not in PROFILES:
            raise ConfigError("profile", f"must be one of {PROFILES}")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if not 0 < self.tau <= 1:
            raise ConfigError("tau", "must lie in (0, 1]")
        self.generation.validate()
        self.convergence.validate(self.generation.horizon)
        return self

    def replications_for(self, size: int) -> int:
        if self.profile == "quick" and size >= QUICK_LARGE_SIZE:
            return min(self.replications, QUICK_LARGE_REPS)
        return self.replications

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {"sizes", "replications", "top_k_groups", "master_seed", "generation",
                 "convergence", "tau", "profile", "workers"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        kw = dict(data)
        for key in ("sizes", "top_k_groups"):
            if key in kw:
                if not isinstance(kw[key], list) or not all(
                    isinstance(x, int) and not isinstance(x, bool) for x in kw[key]
                ):
                    raise ConfigError(key, "expected a list of integers")
                kw[key] = tuple(kw[key])
        for key in ("replications", "master_seed", "workers"):
            if key in kw and (not isinstance(kw[key], int) or isinstance(kw[key], bool)):
                raise ConfigError(key, "expected an integer")
        if "tau" in kw:
            if not isinstance(kw["tau"], (int, float)) or isinstance(kw["tau"], bool):
                raise ConfigError("tau", "expected a number")
            kw["tau"] = float(kw["tau"])
        if "profile" in kw and not isinstance(kw["profile"], str):
            raise ConfigError("profile", "expected a string")
        if "generation" in kw:
            kw["generation"] = GenerationConfig.from_dict(kw["generation"])
        if "convergence" in kw:
            kw["convergence"] = ConvergenceConfig.from_dict(kw["convergence"])
        return cls(**kw).validate()

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "replications": self.replications,
            "top_k_groups": list(self.top_k_groups),
            "master_seed": self.master_seed,
            "generation": self.generation.to_dict(),
            "convergence": self.convergence.to_dict(),
            "tau": self.tau,
            "profile": self.profile,
            "workers": self.workers,
        }


def split_size(size: int) -> tuple[int, int]:
    """Source network sizes; D comes on top, the odd patent goes to A."""
    return size - size // 2, size // 2


def replication_seeds(master_seed: int, size: int, rep: int) -> list[np.random.SeedSequence]:
    """Independent streams for network A, network B and the fusion step."""
    return np.random.SeedSequence([master_seed, size, rep]).spawn(3)


@dataclass
class ReplicationResult:
    size: int
    replication: int
    ranks: dict[str, int] = field(default_factory=dict)
    reliability: dict[str, DistributionStats] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def run_replication(
    size: int,
    gen_cfg: GenerationConfig,
    conv_cfg: ConvergenceConfig,
    seed: int,
    replication: int = 0,
    tau: float = 0.5,
) -> ReplicationResult:
    """One paired generation, fusion and ranking; errors are captured, not raised."""
    result = ReplicationResult(size, replication)
    try:
        n_a, n_b = split_size(size)
        ss_a, ss_b, ss_c = replication_seeds(seed, size, replication)
        net_a, _ = generate(_resize(gen_cfg, n_a), DomainTag.A, np.random.default_rng(ss_a))
        net_b, _ = generate(_resize(gen_cfg, n_b), DomainTag.B, np.random.default_rng(ss_b))
        combined = combine(net_a, net_b, conv_cfg, gen_cfg, np.random.default_rng(ss_c))
        report = analyze_network(combined.network, tau).report
        d = combined.discontinuity_id
        result.ranks = {m: report.rank_of(d, m) for m in METRICS}
        result.reliability = {"a": reliability_stats(net_a), "b": reliability_stats(net_b)}
    except Exception as exc:  # recorded and counted by the caller
        logger.exception("replication %d at size %d failed", replication, size)
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _resize(cfg: GenerationConfig, n: int) -> GenerationConfig:
    return GenerationConfig.from_dict({**cfg.to_dict(), "n": n})


def _run_task(args) -> ReplicationResult:
    return run_replication(*args)


@dataclass
class ExperimentSummary:
    config: ExperimentConfig
    results: list[ReplicationResult]

    def successful(self, size: int) -> list[ReplicationResult]:
        return [r for r in self.results if r.size == size and r.ok]

    @property
    def failed(self) -> int:
        return sum(not r.ok for r in self.results)

    def probability(self, size: int, metric: str, k: int) -> float:
        runs = self.successful(size)
        if not runs:
            return 0.0
        return sum(r.ranks[metric] <= k for r in runs) / len(runs)

    def probabilities(self) -> list[tuple[int, str, int, float]]:
        return [
            (size, metric, k, self.probability(size, metric, k))
            for size in self.config.sizes
            for metric in METRICS
            for k in self.config.top_k_groups
        ]

    def to_dict(self) -> dict:
        cells: dict[str, dict[str, dict[str, float]]] = {}
        for size, metric, k, p in self.probabilities():
            cells.setdefault(str(size), {}).setdefault(metric, {})[str(k)] = p
        return {
            "config": self.config.to_dict(),
            "replications_per_size": {
                str(s): self.config.replications_for(s) for s in self.config.sizes
            },
            "failed_replications": self.failed,
            "identification_probability": cells,
            "replications": [
                {
                    "size": r.size,
                    "replication": r.replication,
                    "ranks": r.ranks,
                    "error": r.error,
                    "reliability": {k: v.to_dict() for k, v in r.reliability.items()},
                }
                for r in self.results
            ],
        }


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """All replications for all sizes, merged in (size, replication) order."""
    cfg.validate()
    tasks = [
        (size, cfg.generation, cfg.convergence, cfg.master_seed, rep, cfg.tau)
        for size in cfg.sizes
        for rep in range(cfg.replications_for(size))
    ]
    if cfg.workers == 1:
        results = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=1))
    results.sort(key=lambda r: (cfg.sizes.index(r.size), r.replication))
    summary = ExperimentSummary(cfg, results)
    if summary.failed:
        logger.error("%d replication(s) failed", summary.failed)
    return summary


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(x) if isinstance(x, float) else str(x)


def emit_report(summary: ExperimentSummary, out_dir: str | Path) -> None:
    """Write summary.json, fig11.csv, fig12.csv, reliability.csv and ranks.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = summary.config
    (out / "summary.json").write_text(
        json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    rows = summary.probabilities() if summary.results else []

    with open(out / "fig11.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["size", "metric", "k", "probability"])
        for size, metric, k, p in rows:
            w.writerow([size, metric, k, _fmt(p)])

    sizes = list(cfg.sizes) if summary.results else []
    with open(out / "fig12.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "k"] + [str(s) for s in sizes])
        table = {(s, m, k): p for s, m, k, p in rows}
        if sizes:
            for metric in METRICS:
                for k in cfg.top_k_groups:
                    w.writerow([metric, k] + [_fmt(table[(s, metric, k)]) for s in sizes])

    with open(out / "reliability.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["size", "replication", "network", "growth_rate", "rank_slope",
                    "lag_mode", "backward_trend_rho"])
        for r in summary.results:
            for name, st in sorted(r.reliability.items()):
                w.writerow([r.size, r.replication, name, _fmt(st.growth_rate),
                            _fmt(st.rank_slope), _fmt(st.lag_mode), _fmt(st.backward_trend_rho)])

    with open(out / "ranks.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["size", "replication"] + list(METRICS) + ["error"])
        for r in summary.results:
            w.writerow([r.size, r.replication] + [r.ranks.get(m, "") for m in METRICS]
                       + [r.error or ""])


def write_reliability(stats_: DistributionStats, path: str | Path) -> None:
    """Single-network reliability listing (statistic, key, value)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["statistic", "key", "value"])
        w.writerow(["growth_rate", "", _fmt(stats_.growth_rate)])
        w.writerow(["rank_slope", "", _fmt(stats_.rank_slope)])
        w.writerow(["lag_mode", "", _fmt(stats_.lag_mode)])
        w.writerow(["backward_trend_rho", "", _fmt(stats_.backward_trend_rho)])
        for lag, c in stats_.lag_histogram.items():
            w.writerow(["lag_count", lag, c])
        for y, m in stats_.mean_backward_by_year.items():
            w.writerow(["mean_backward", y, _fmt(m)])
