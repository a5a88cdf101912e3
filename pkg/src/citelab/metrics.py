"""The five discontinuity metrics, rankings and report export.

    m1 = FWDCIT
    m2 = P
    m3 = FWDCIT * P
    m4 = 1 / MP - 1                      (HPPs with an ancestor HPP only)
    m5 = PATH / (1 + BWDCIT + PATH) * P
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .graph import CitationNetwork, PatentId, id_key
from .mainpath import MainPathGraph, build_segments
from .persistence import PersistenceTable, compute_persistence

METRICS = ("m1", "m2", "m3", "m4", "m5")
CSV_HEADER = ["id", "year", "fwdcit", "bwdcit", "p", "np", "path", "mp", "m1", "m2", "m3", "m4", "m5"]


def metric1(fwdcit: int) -> float:
    return float(fwdcit)


def metric2(p: float) -> float:
    return p


def metric3(fwdcit: int, p: float) -> float:
    return fwdcit * p


def metric4(mp: Optional[float]) -> Optional[float]:
    if mp is None:
        return None
    if not 0 < mp <= 1:
        raise ValueError(f"minimum persistence must lie in (0, 1], got {mp}")
    return 1.0 / mp - 1.0


def metric5(path: int, bwdcit: int, p: float) -> float:
    return path / (1 + bwdcit + path) * p


@dataclass(frozen=True)
class MetricRecord:
    id: PatentId
    year: int
    fwdcit: int
    bwdcit: int
    p: float
    np: float
    path: int
    mp: Optional[float]
    m1: float
    m2: float
    m3: float
    m4: Optional[float]
    m5: float

    def row(self) -> list:
        def fmt(x):
            if x is None:
                return ""
            return repr(x) if isinstance(x, float) else x

        return [fmt(getattr(self, c)) for c in CSV_HEADER]


@dataclass(frozen=True)
class RankEntry:
    rank: int
    id: PatentId
    value: Optional[float]
    normalized: Optional[float]


class MetricReport:
    """Per-patent metric records, in ascending id order."""

    def __init__(self, records: list[MetricRecord]):
        self.records = records
        self.by_id = {r.id: r for r in records}
        self._order: dict[str, list[MetricRecord]] = {}

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, pid: PatentId) -> MetricRecord:
        return self.by_id[pid]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MetricReport) and self.records == other.records

    def _ordered(self, metric: str) -> list[MetricRecord]:
        if metric not in self._order:
            self._order[metric] = sorted(self.records, key=_sort_key(metric))
        return self._order[metric]

    def max_value(self, metric: str) -> float:
        metric = _metric_name(metric)
        vals = [getattr(r, metric) for r in self.records if getattr(r, metric) is not None]
        return max(vals) if vals else 0.0

    def rank_of(self, pid: PatentId, metric: str) -> int:
        metric = _metric_name(metric)
        for pos, r in enumerate(self._ordered(metric), start=1):
            if r.id == pid:
                return pos
        raise KeyError(pid)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in self.records:
                w.writerow(r.row())


def _metric_name(metric) -> str:
    name = f"m{metric}" if isinstance(metric, int) else str(metric)
    if name not in METRICS:
        raise KeyError(f"unknown metric {metric!r}")
    return name


def _sort_key(metric: str):
    def key(r: MetricRecord):
        v = getattr(r, metric)
        return (v is None, -(v or 0.0), -r.p, -r.fwdcit, id_key(r.id))

    return key


def rank(report: MetricReport, metric_id, k: Optional[int] = None) -> list[RankEntry]:
    """Descending by value; ties by higher P, higher FWDCIT, then ascending id.

    Patents without a value (m4 off the main paths) come last.
    """
    metric = _metric_name(metric_id)
    top = report.max_value(metric)
    ordered = report._ordered(metric)
    if k is not None:
        ordered = ordered[:k]
    out = []
    for pos, r in enumerate(ordered, start=1):
        v = getattr(r, metric)
        norm = None if v is None else (v / top if top > 0 else 0.0)
        out.append(RankEntry(pos, r.id, v, norm))
    return out


def compute_metrics(net: CitationNetwork, ptable: PersistenceTable, mpg: MainPathGraph) -> MetricReport:
    records = []
    for i, pid in enumerate(net.ids):
        fwd = len(net.forward[i])
        bwd = len(net.backward[i])
        p = ptable.raw[pid]
        path = mpg.path_count.get(pid, 0)
        mp = mpg.mp_gap.get(pid)
        records.append(MetricRecord(
            id=pid,
            year=net.years[i],
            fwdcit=fwd,
            bwdcit=bwd,
            p=p,
            np=ptable.normalized[pid],
            path=path,
            mp=mp,
            m1=metric1(fwd),
            m2=metric2(p),
            m3=metric3(fwd, p),
            m4=metric4(mp),
            m5=metric5(path, bwd, p),
        ))
    return MetricReport(records)


@dataclass
class Analysis:
    net: CitationNetwork
    layers: dict[PatentId, int]
    persistence: PersistenceTable
    mainpaths: MainPathGraph
    report: MetricReport

    def write(self, out_dir: str | Path, top_k: int = 15) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.persistence.to_csv(out / "persistence.csv", self.net, self.layers)
        self.mainpaths.to_csv(out / "mainpaths.csv")
        self.report.to_csv(out / "metrics.csv")
        write_top_k(self.report, out / "top_k.csv", top_k)


def analyze_network(net: CitationNetwork, tau: float = 0.5, alpha: float = 0.0) -> Analysis:
    """Persistence, main paths and all five metrics for ``net``."""
    ptable, layers = compute_persistence(net, tau, alpha)
    mpg = build_segments(net, ptable)
    return Analysis(net, layers, ptable, mpg, compute_metrics(net, ptable, mpg))


def write_top_k(report: MetricReport, path: str | Path, k: int = 15) -> None:
    """Top-``k`` listing per metric: metric, rank, id, year, value, normalized."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "rank", "id", "year", "value", "normalized"])
        for metric in METRICS:
            for e in rank(report, metric, k):
                if e.value is None:
                    break
                w.writerow([metric, e.rank, e.id, report[e.id].year, repr(e.value), repr(e.normalized)])
