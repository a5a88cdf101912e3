"""Plant a designed discontinuity by fusing two independent networks.

The two source networks are relabelled (odd ids for A, even ids for B) and
joined at a single new patent D.  D cites the most persistent patents of each
domain as of its own year and receives a boosted number of forward citations
from both domains (by default three times the largest count in either source).  From ``disc_year + lag_gap`` on, backward citations are
redirected to same-year patents of the other domain with a probability that
ramps up linearly until the horizon.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .graph import (
    CitationEdge,
    CitationNetwork,
    DomainTag,
    NetworkError,
    PatentId,
    PatentRecord,
    build_network,
    id_key,
)
from .netgen import ConfigError, GenerationConfig, _from_dict, wire_forward
from .persistence import persistence_scores

logger = logging.getLogger(__name__)

DISCONTINUITY_ID = 0


@dataclass(frozen=True)
class ConvergenceConfig:
    disc_year: Optional[int] = None  # None: horizon // 2
    disc_backward_a: int = 3
    disc_backward_b: int = 3
    disc_forward_boost: Optional[int] = None  # None: factor * max realized FWDCIT of A and B
    disc_forward_boost_factor: float = 3.0
    lag_gap: int = 2
    ramp_start_k: float = 5.0
    ramp_end_k: float = 50.0
    seed: int = 0

    def resolved_disc_year(self, horizon: int) -> int:
        return self.disc_year if self.disc_year is not None else horizon // 2

    def validate(self, horizon: int = 30) -> "ConvergenceConfig":
        dy = self.resolved_disc_year(horizon)
        if dy < 2:
            raise ConfigError("disc_year", "must be >= 2")
        if self.lag_gap < 0:
            raise ConfigError("lag_gap", "must be >= 0")
        if not dy + self.lag_gap < horizon:
            raise ConfigError("disc_year", f"disc_year + lag_gap must be < horizon ({horizon})")
        if not 0 <= self.ramp_start_k <= self.ramp_end_k <= 100:
            raise ConfigError("ramp_end_k", "need 0 <= ramp_start_k <= ramp_end_k <= 100")
        if self.disc_backward_a < 1 or self.disc_backward_b < 1:
            raise ConfigError("disc_backward_a", "D must cite at least one patent per domain")
        if self.disc_forward_boost is not None and self.disc_forward_boost < 0:
            raise ConfigError("disc_forward_boost", "must be >= 0")
        if self.disc_forward_boost_factor < 0:
            raise ConfigError("disc_forward_boost_factor", "must be >= 0")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceConfig":
        return _from_dict(cls, data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ConvergenceConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RewireEvent:
    original_cited: PatentId
    original_citing: PatentId
    new_cited: PatentId
    year: int


@dataclass
class CombinedNetwork:
    network: CitationNetwork
    discontinuity_id: PatentId
    rewire_log: list[RewireEvent] = field(default_factory=list)
    disc_backward: list[PatentId] = field(default_factory=list)
    disc_forward: list[PatentId] = field(default_factory=list)
    skipped_no_candidate: int = 0
    skipped_duplicate: int = 0
    dropped_boost: int = 0

    def discontinuity_info(self) -> dict:
        net = self.network
        d = self.discontinuity_id
        return {
            "id": d,
            "year": net.year(d),
            "backward_citations": self.disc_backward,
            "forward_citations": self.disc_forward,
            "rewired_edges": len(self.rewire_log),
            "skipped_no_candidate": self.skipped_no_candidate,
            "skipped_duplicate": self.skipped_duplicate,
            "dropped_boost": self.dropped_boost,
        }

    def write_rewire_log(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["original_cited", "original_citing", "new_cited", "year"])
            for ev in self.rewire_log:
                w.writerow([ev.original_cited, ev.original_citing, ev.new_cited, ev.year])


def ramp_k(year: int | float, cfg: ConvergenceConfig, horizon: int = 30) -> float:
    """Replacement percentage in ``year``; zero outside the ramp window."""
    start = cfg.resolved_disc_year(horizon) + cfg.lag_gap
    if year < start or year > horizon:
        return 0.0
    if horizon == start:
        return float(cfg.ramp_end_k)
    frac = (year - start) / (horizon - start)
    return cfg.ramp_start_k + (cfg.ramp_end_k - cfg.ramp_start_k) * frac


def _relabel(net: CitationNetwork, tag: DomainTag, parity: int | None):
    """Map a source network onto the combined id space (odd/even if integral)."""
    if parity is None:
        mapping = {pid: pid for pid in net.ids}
    else:
        mapping = {pid: 2 * pid - parity for pid in net.ids}
    nodes = [PatentRecord(mapping[pid], net.years[i], tag) for i, pid in enumerate(net.ids)]
    edges = [(mapping[e.cited], mapping[e.citing]) for e in net.edges()]
    return mapping, nodes, edges


def _integral_ids(net: CitationNetwork) -> bool:
    return all(isinstance(p, int) and not isinstance(p, bool) and p >= 1 for p in net.ids)


def top_persistent(net: CitationNetwork, before_year: int, count: int) -> list[PatentId]:
    """The ``count`` most persistent patents of ``net`` truncated to years < ``before_year``."""
    keep = [i for i in range(len(net)) if net.years[i] < before_year]
    if not keep:
        raise NetworkError(f"no patents before year {before_year}")
    sub_nodes = [PatentRecord(net.ids[i], net.years[i]) for i in keep]
    kept = {net.ids[i] for i in keep}
    sub_edges = [e for e in net.edges() if e.cited in kept and e.citing in kept]
    sub = build_network(sub_nodes, sub_edges)
    p = persistence_scores(sub)
    ranked = sorted(sub.ids, key=lambda x: (-p[x], -sub.fwdcit(x), id_key(x)))
    return ranked[:count]


def combine(
    net_a: CitationNetwork,
    net_b: CitationNetwork,
    cfg: ConvergenceConfig,
    gen_cfg: GenerationConfig | None = None,
    rng: np.random.Generator | None = None,
) -> CombinedNetwork:
    """Fuse ``net_a`` and ``net_b`` at a designed discontinuity D.

    ``gen_cfg`` supplies the citation-lag windows used to wire D's forward
    citations and the horizon; by default the generator defaults with the
    horizon taken from the latest year present.
    """
    if gen_cfg is None:
        gen_cfg = GenerationConfig(horizon=max(net_a.max_year, net_b.max_year, 2))
    horizon = gen_cfg.horizon
    cfg.validate(horizon)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    disc_year = cfg.resolved_disc_year(horizon)

    if _integral_ids(net_a) and _integral_ids(net_b):
        map_a, nodes_a, edges_a = _relabel(net_a, DomainTag.A, 1)
        map_b, nodes_b, edges_b = _relabel(net_b, DomainTag.B, 0)
    else:
        overlap = set(net_a.ids) & set(net_b.ids)
        if overlap:
            raise NetworkError(f"overlapping id spaces ({len(overlap)} shared ids)")
        map_a, nodes_a, edges_a = _relabel(net_a, DomainTag.A, None)
        map_b, nodes_b, edges_b = _relabel(net_b, DomainTag.B, None)
    disc_id = DISCONTINUITY_ID
    if disc_id in map_a.values() or disc_id in map_b.values():
        disc_id = "D"

    try:
        cites_a = [map_a[x] for x in top_persistent(net_a, disc_year, cfg.disc_backward_a)]
        cites_b = [map_b[x] for x in top_persistent(net_b, disc_year, cfg.disc_backward_b)]
    except NetworkError as exc:
        raise NetworkError(f"disc_year {disc_year} invalid for these networks: {exc}") from None

    nodes = nodes_a + nodes_b
    years = {rec.id: rec.year for rec in nodes}
    tags = {rec.id: rec.domain_tag for rec in nodes}
    edges: set[tuple[PatentId, PatentId]] = set(edges_a) | set(edges_b)
    backward: dict[PatentId, set[PatentId]] = {}
    for u, v in edges:
        backward.setdefault(v, set()).add(u)

    # Cross-domain replacement of original backward citations.
    by_year: dict[tuple[DomainTag, int], list[PatentId]] = {}
    for rec in sorted(nodes, key=lambda r: id_key(r.id)):
        by_year.setdefault((rec.domain_tag, rec.year), []).append(rec.id)
    start = disc_year + cfg.lag_gap
    result = CombinedNetwork(None, disc_id)  # type: ignore[arg-type]
    for u, v in sorted(edges, key=lambda e: (id_key(e[1]), id_key(e[0]))):
        y = years[v]
        if y < start:
            continue
        k = ramp_k(y, cfg, horizon)
        if k <= 0 or rng.random() >= k / 100.0:
            continue
        other = DomainTag.B if tags[u] == DomainTag.A else DomainTag.A
        candidates = by_year.get((other, years[u]), [])
        if not candidates:
            result.skipped_no_candidate += 1
            continue
        w = candidates[int(rng.integers(len(candidates)))]
        if w in backward[v]:
            result.skipped_duplicate += 1
            continue
        edges.discard((u, v))
        edges.add((w, v))
        backward[v].discard(u)
        backward[v].add(w)
        result.rewire_log.append(RewireEvent(u, v, w, y))
    if result.skipped_no_candidate:
        logger.info("skipped %d replacements without a same-year candidate", result.skipped_no_candidate)

    # D: backward links into both domains, boosted forward citations from both.
    boost = cfg.disc_forward_boost
    if boost is None:
        top = max(max((len(f) for f in net_a.forward), default=0),
                  max((len(f) for f in net_b.forward), default=0))
        boost = int(round(cfg.disc_forward_boost_factor * top))
    pool = sorted((rec.id for rec in nodes), key=lambda x: (years[x], id_key(x)))
    pool_years = np.array([years[x] for x in pool], dtype=np.int64)
    picked, result.dropped_boost = wire_forward(disc_year, boost, pool_years, gen_cfg, rng)
    result.disc_backward = sorted(cites_a + cites_b, key=id_key)
    result.disc_forward = sorted((pool[p] for p in picked), key=id_key)
    edges.update((c, disc_id) for c in result.disc_backward)
    edges.update((disc_id, c) for c in result.disc_forward)

    nodes.append(PatentRecord(disc_id, disc_year, DomainTag.MERGED))
    result.network = build_network(
        nodes,
        (CitationEdge(u, v) for u, v in sorted(edges, key=lambda e: (id_key(e[0]), id_key(e[1])))),
        mode="strict",
        year_range=(min(net_a.min_year, net_b.min_year), horizon),
    )
    return result


def cross_domain_edges(net: CitationNetwork) -> list[tuple[PatentId, PatentId]]:
    """Edges joining an A patent and a B patent (D's edges excluded)."""
    out = []
    for e in net.edges():
        ta, tb = net.record(e.cited).domain_tag, net.record(e.citing).domain_tag
        if {ta, tb} == {DomainTag.A, DomainTag.B}:
            out.append((e.cited, e.citing))
    return out
