"""Synthetic patent citation networks.

Four steps: yearly patent counts from an exponential growth curve, forward
citation counts from a power law over rank, a year for every patent subject
to the citation-lag windows, and finally the concrete citing patents.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .graph import CitationEdge, CitationNetwork, DomainTag, PatentRecord, build_network

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class GenerationConfig:
    n: int = 1000
    horizon: int = 30
    growth_rate: float = 0.05
    growth_a: float = 1.0
    growth_b: float = -1.0
    powerlaw_a: float = 1.0
    powerlaw_b: float = 0.5
    avg_citations: float = 3.0
    lag_frac_p1: float = 0.10
    lag_frac_p2: float = 0.10
    p1_len: int = 5
    p2_len: int = 10
    seed: int = 0

    def validate(self) -> "GenerationConfig":
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError("n", f"must be an integer >= 1, got {self.n!r}")
        if self.horizon < 2:
            raise ConfigError("horizon", "must be >= 2")
        if not self.growth_rate > 0:
            raise ConfigError("growth_rate", "must be > 0")
        if self.avg_citations < 0:
            raise ConfigError("avg_citations", "must be >= 0")
        for name in ("lag_frac_p1", "lag_frac_p2"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be >= 0")
        if self.lag_frac_p1 + self.lag_frac_p2 > 1:
            raise ConfigError("lag_frac_p2", "lag_frac_p1 + lag_frac_p2 must be <= 1")
        if not 0 < self.p1_len < self.p2_len < self.horizon:
            raise ConfigError("p2_len", "need 0 < p1_len < p2_len < horizon")
        weights = year_weights(self)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ConfigError("growth_b", "yearly weights must be non-negative with positive sum")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationConfig":
        return _from_dict(cls, data)

    @classmethod
    def from_json(cls, path: str | Path) -> "GenerationConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return asdict(self)


def _from_dict(cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown field")
    kwargs = {}
    for key, value in data.items():
        default = getattr(cls(), key)
        if isinstance(default, bool) or value is None:
            kwargs[key] = value
        elif isinstance(default, int) and not isinstance(default, bool):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(key, f"expected integer, got {value!r}")
            kwargs[key] = value
        elif isinstance(default, float):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(key, f"expected number, got {value!r}")
            kwargs[key] = float(value)
        else:
            kwargs[key] = value
    return cls(**kwargs)


@dataclass
class GenerationTrace:
    yearly_counts: dict[int, int]
    citation_counts: dict[int, int]
    assigned_years: dict[int, int]
    dropped_citations: int = 0
    unplaceable_patents: int = 0

    def to_dict(self) -> dict:
        return {
            "yearly_counts": {str(k): v for k, v in self.yearly_counts.items()},
            "citation_counts": {str(k): v for k, v in self.citation_counts.items()},
            "assigned_years": {str(k): v for k, v in self.assigned_years.items()},
            "dropped_citations": self.dropped_citations,
            "unplaceable_patents": self.unplaceable_patents,
        }


def sample_counts(weights, draws: int, rng: np.random.Generator) -> np.ndarray:
    """Drop ``draws`` uniform variates onto the normalized cumulative weights.

    Inverse-CDF sampling via binary search; returns per-bin counts.
    """
    w = np.asarray(weights, dtype=float)
    if draws <= 0 or w.size == 0:
        return np.zeros(w.size, dtype=np.int64)
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    u = rng.random(draws)
    bins = np.searchsorted(cdf, u, side="right")
    np.minimum(bins, w.size - 1, out=bins)
    return np.bincount(bins, minlength=w.size)


def year_weights(cfg: GenerationConfig) -> np.ndarray:
    t = np.arange(1, cfg.horizon + 1, dtype=float)
    return cfg.growth_a * np.exp(cfg.growth_rate * t) + cfg.growth_b


def rank_weights(n: int, b: float) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float) ** (-b)


def yearly_counts(cfg: GenerationConfig, rng: np.random.Generator) -> dict[int, int]:
    counts = sample_counts(year_weights(cfg), cfg.n, rng)
    return {t: int(c) for t, c in enumerate(counts, start=1)}


def citation_counts(cfg: GenerationConfig, rng: np.random.Generator) -> list[int]:
    """Forward-citation count for each rank R = 1..n (index R-1)."""
    events = int(round(cfg.avg_citations * cfg.n))
    weights = cfg.powerlaw_a * rank_weights(cfg.n, cfg.powerlaw_b)
    return [int(c) for c in sample_counts(weights, events, rng)]


def period_quotas(f: int, lag_frac_p1: float = 0.1, lag_frac_p2: float = 0.1) -> tuple[int, int, int]:
    """Split ``f`` citations into the period-1, period-2 and remainder quotas."""
    q1 = min(f, math.ceil(round(lag_frac_p1 * f, 12)))
    q2 = min(f - q1, math.ceil(round(lag_frac_p2 * (f - q1), 12)))
    return q1, q2, f - q1 - q2


def _window_counts(per_year: np.ndarray, cfg: GenerationConfig):
    """Patents available in (t, t+p1], (t, t+p2] and (t, horizon] for t = 1..horizon."""
    h = cfg.horizon
    cum = np.concatenate([[0], np.cumsum(per_year)])  # cum[t] = patents in years <= t

    def after(length: int | None) -> np.ndarray:
        t = np.arange(1, h + 1)
        end = t + length if length is not None else np.full(h, h)
        return cum[np.minimum(end, h)] - cum[t]

    return after(cfg.p1_len), after(cfg.p2_len), after(None)


def feasible_years(
    f: int, yearly: dict[int, int], cfg: GenerationConfig
) -> list[int]:
    """Years a patent with ``f`` forward citations may occupy (ignoring capacity)."""
    per_year = np.array([yearly.get(t, 0) for t in range(1, cfg.horizon + 1)])
    w1, w2, w3 = _window_counts(per_year, cfg)
    q1, q2, _ = period_quotas(f, cfg.lag_frac_p1, cfg.lag_frac_p2)
    ok = (w1 >= q1) & (w2 >= q1 + q2) & (w3 >= f)
    return [t for t in range(1, cfg.horizon + 1) if ok[t - 1]]


def assign_years(
    counts: list[int],
    yearly: dict[int, int],
    cfg: GenerationConfig,
    rng: np.random.Generator,
) -> tuple[list[int], int]:
    """Place every patent (by rank) in a year; returns (years, fallback count).

    Most-cited patents go first since they have the fewest feasible years.
    A patent with no feasible year left takes the earliest year that still
    has capacity; its surplus citations are dropped during wiring.
    """
    h = cfg.horizon
    per_year = np.array([yearly.get(t, 0) for t in range(1, h + 1)], dtype=np.int64)
    if per_year.sum() != len(counts):
        raise ValueError("yearly counts do not sum to the number of patents")
    w1, w2, w3 = _window_counts(per_year, cfg)
    capacity = per_year.copy()
    feasible_cache: dict[int, np.ndarray] = {}
    years = [0] * len(counts)
    fallbacks = 0
    order = sorted(range(len(counts)), key=lambda r: (-counts[r], r))
    for r in order:
        f = counts[r]
        mask = feasible_cache.get(f)
        if mask is None:
            q1, q2, _ = period_quotas(f, cfg.lag_frac_p1, cfg.lag_frac_p2)
            mask = (w1 >= q1) & (w2 >= q1 + q2) & (w3 >= f)
            feasible_cache[f] = mask
        open_years = np.flatnonzero(mask & (capacity > 0))
        if open_years.size:
            slot = int(open_years[rng.integers(open_years.size)])
        else:
            slot = int(np.flatnonzero(capacity > 0)[0])
            fallbacks += 1
        capacity[slot] -= 1
        years[r] = slot + 1
    return years, fallbacks


def _draw_from_range(
    lo: int, hi: int, q: int, chosen: set[int], rng: np.random.Generator
) -> list[int]:
    """Up to ``q`` distinct positions in [lo, hi) not already in ``chosen``."""
    if q <= 0 or hi <= lo:
        return []
    taken = sum(1 for c in chosen if lo <= c < hi)
    free = hi - lo - taken
    if free <= 0:
        return []
    if q >= free or 2 * (q + taken) > hi - lo:
        pool = [p for p in range(lo, hi) if p not in chosen]
        if q >= len(pool):
            return pool
        pick = rng.choice(len(pool), size=q, replace=False)
        return [pool[i] for i in sorted(pick)]
    out: list[int] = []
    local = set(chosen)
    while len(out) < q:
        p = int(rng.integers(lo, hi))
        if p not in local:
            local.add(p)
            out.append(p)
    return out


def wire_forward(
    source_year: int,
    f: int,
    pool_years: np.ndarray,
    cfg: GenerationConfig,
    rng: np.random.Generator,
) -> tuple[list[int], int]:
    """Choose ``f`` citers for a patent at ``source_year`` from a year-sorted pool.

    ``pool_years`` must be sorted ascending; returns (pool positions, dropped).
    """
    q1, q2, q3 = period_quotas(f, cfg.lag_frac_p1, cfg.lag_frac_p2)
    lo = int(np.searchsorted(pool_years, source_year, side="right"))
    end1 = int(np.searchsorted(pool_years, source_year + cfg.p1_len, side="right"))
    end2 = int(np.searchsorted(pool_years, source_year + cfg.p2_len, side="right"))
    end3 = int(np.searchsorted(pool_years, cfg.horizon, side="right"))
    chosen: set[int] = set()
    picked: list[int] = []
    for q, hi in ((q1, end1), (q2, end2), (q3, end3)):
        got = _draw_from_range(lo, hi, q, chosen, rng)
        chosen.update(got)
        picked.extend(got)
    return picked, f - len(picked)


def wire_citations(
    years: list[int],
    counts: list[int],
    cfg: GenerationConfig,
    rng: np.random.Generator,
) -> tuple[list[tuple[int, int]], int]:
    """Citing patents for every patent; returns (rank-index edges, dropped slots)."""
    by_year = sorted(range(len(years)), key=lambda r: (years[r], r))
    pool_years = np.array([years[r] for r in by_year], dtype=np.int64)
    edges: list[tuple[int, int]] = []
    dropped = 0
    for r in range(len(years)):
        f = counts[r]
        if f == 0:
            continue
        picked, lost = wire_forward(years[r], f, pool_years, cfg, rng)
        dropped += lost
        edges.extend((r, by_year[p]) for p in picked)
    return edges, dropped


def generate(
    cfg: GenerationConfig,
    tag: DomainTag = DomainTag.NONE,
    rng: np.random.Generator | None = None,
) -> tuple[CitationNetwork, GenerationTrace]:
    """Run all four steps.  Patent ids are 1..n in citation-rank order."""
    cfg.validate()
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    yearly = yearly_counts(cfg, rng)
    counts = citation_counts(cfg, rng)
    years, fallbacks = assign_years(counts, yearly, cfg, rng)
    edges, dropped = wire_citations(years, counts, cfg, rng)
    nodes = [PatentRecord(r + 1, years[r], tag) for r in range(cfg.n)]
    net = build_network(
        nodes,
        (CitationEdge(u + 1, v + 1) for u, v in edges),
        mode="strict",
        year_range=(1, cfg.horizon),
    )
    trace = GenerationTrace(
        yearly_counts=yearly,
        citation_counts={r + 1: c for r, c in enumerate(counts)},
        assigned_years={r + 1: y for r, y in enumerate(years)},
        dropped_citations=dropped,
        unplaceable_patents=fallbacks,
    )
    total = sum(counts)
    if total and dropped / total > 0.05:
        logger.warning("dropped %d of %d citation slots (n=%d)", dropped, total, cfg.n)
    return net, trace
