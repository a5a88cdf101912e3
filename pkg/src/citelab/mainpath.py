"""Persistence-based main paths between high-persistence patents (HPPs).

For every HPP ``h`` and every ancestor HPP ``a`` that reaches ``h`` without
passing through a third HPP, one connecting segment is kept: the citation path
whose weakest interior patent (by normalized persistence) is strongest.  Ties
go to the shorter path, then to the lexicographically smallest id sequence.

The search from each ``a`` is a single topological sweep over the non-HPP
region it reaches, carrying a Pareto front of (width, length) labels per node,
so the tie-break rules are honoured exactly without enumerating paths.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .graph import CitationNetwork, PatentId
from .persistence import PersistenceTable

# label: (width, length, path as tuple of node indices)
Label = tuple[float, int, tuple[int, ...]]


@dataclass(frozen=True)
class MainPathGraph:
    segments: tuple[tuple[PatentId, ...], ...]
    on_path: frozenset
    hpp: frozenset
    normalized: dict[PatentId, float] = field(repr=False)
    path_count: dict[PatentId, int] = field(default_factory=dict, repr=False)
    mp_gap: dict[PatentId, float] = field(default_factory=dict, repr=False)

    def segment_edges(self) -> set[tuple[PatentId, PatentId]]:
        return {(s[i], s[i + 1]) for s in self.segments for i in range(len(s) - 1)}

    def starts(self) -> list[PatentId]:
        return [s[0] for s in self.segments if len(s) == 1]

    def incoming(self, h: PatentId) -> list[tuple[PatentId, ...]]:
        return [s for s in self.segments if len(s) > 1 and s[-1] == h]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["from_id", "to_id", "segment_id"])
            for sid, seg in enumerate(self.segments):
                for a, b in zip(seg, seg[1:]):
                    w.writerow([a, b, sid])


def _insert(front: list[Label], label: Label) -> None:
    """Add ``label`` to a Pareto front (max width, min length, min path)."""
    w, n, p = label
    for k, (w2, n2, p2) in enumerate(front):
        if w2 >= w and n2 <= n:
            if w2 == w and n2 == n and p < p2:
                front[k] = label
            return
    front[:] = [x for x in front if not (w >= x[0] and n <= x[1])]
    front.append(label)


def _better(a: Label, b: Label | None) -> bool:
    if b is None:
        return True
    return (-a[0], a[1], a[2]) < (-b[0], b[1], b[2])


def _segments_from(
    src: int,
    forward: tuple[tuple[int, ...], ...],
    is_hpp: list[bool],
    npv: list[float],
    topo_pos: list[int],
) -> dict[int, Label]:
    """Best segment from HPP ``src`` to each HPP it reaches through non-HPPs."""
    region = []
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in forward[u]:
            if v not in seen:
                seen.add(v)
                if not is_hpp[v]:
                    region.append(v)
                    stack.append(v)
    region.sort(key=topo_pos.__getitem__)

    fronts: dict[int, list[Label]] = {}
    best: dict[int, Label] = {}

    def relax(label: Label, v: int) -> None:
        if is_hpp[v]:
            if _better(label, best.get(v)):
                best[v] = label
        else:
            lab = (min(label[0], npv[v]), label[1], label[2])
            front = fronts.get(v)
            if front is None:
                fronts[v] = [lab]
            else:
                _insert(front, lab)

    start = (1.0, 0, (src,))
    for v in forward[src]:
        relax((start[0], 1, (src, v)), v)
    for u in region:
        for w, n, p in fronts.pop(u, ()):
            for v in forward[u]:
                relax((w, n + 1, p + (v,)), v)
    return best


def build_segments(net: CitationNetwork, ptable: PersistenceTable) -> MainPathGraph:
    ids = net.ids
    is_hpp = [pid in ptable.hpp for pid in ids]
    npv = [ptable.normalized[pid] for pid in ids]
    topo_pos = [0] * len(ids)
    for pos, i in enumerate(net.topo_indices()):
        topo_pos[i] = pos

    paths: list[tuple[int, ...]] = []
    gaps: dict[int, float] = {}
    for a in sorted((i for i in range(len(ids)) if is_hpp[i]), key=topo_pos.__getitem__):
        for h, (width, _, p) in _segments_from(a, net.forward, is_hpp, npv, topo_pos).items():
            paths.append(p)
            gaps[h] = max(width, gaps.get(h, 0.0))
    for i in range(len(ids)):
        if is_hpp[i] and i not in gaps:
            paths.append((i,))
    paths.sort()

    segments = tuple(tuple(ids[i] for i in p) for p in paths)
    on_path = frozenset(pid for s in segments for pid in s)
    mpg = MainPathGraph(segments, on_path, ptable.hpp, ptable.normalized)
    mpg.path_count.update(converging_path_counts(mpg))
    mpg.mp_gap.update((ids[h], gaps[h]) for h in sorted(gaps))
    return mpg


def converging_path_counts(mpg: MainPathGraph) -> dict[PatentId, int]:
    """Segment-graph in-degree; a patent starting a main path counts one."""
    counts: dict[PatentId, int] = {}
    for a, b in mpg.segment_edges():
        counts[b] = counts.get(b, 0) + 1
    for s in mpg.starts():
        counts[s] = counts.get(s, 0) + 1
    return counts


def segment_width(seg: tuple[PatentId, ...], normalized: dict[PatentId, float]) -> float:
    interior = seg[1:-1]
    return min(normalized[v] for v in interior) if interior else 1.0


def min_persistence_gap(mpg: MainPathGraph, h: PatentId) -> Optional[float]:
    """Strongest link from any ancestor HPP into ``h``; None if there is none."""
    if h not in mpg.hpp:
        raise ValueError(f"{h!r} is not a high-persistence patent")
    widths = [segment_width(s, mpg.normalized) for s in mpg.incoming(h)]
    return max(widths) if widths else None
