"""Immutable citation-network model.

Knowledge flows from the cited patent to the citing patent, so an edge
``cited -> citing`` is a *forward* citation of ``cited`` and a *backward*
citation of ``citing``.  Nodes are stored internally by a dense integer index
assigned in ascending id order, which lets the algorithms work on plain lists
while keeping id-based tie-breaking cheap (index order == id order).
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)

PatentId = Hashable


class NetworkError(ValueError):
    """Raised when nodes or edges violate the network invariants."""


class DomainTag(str, Enum):
    A = "A"
    B = "B"
    MERGED = "merged"
    NONE = "none"


@dataclass(frozen=True)
class PatentRecord:
    id: PatentId
    year: int
    domain_tag: DomainTag = DomainTag.NONE


@dataclass(frozen=True)
class CitationEdge:
    cited: PatentId
    citing: PatentId


def id_key(pid: PatentId) -> tuple:
    """Total order over ids: integers numerically, then strings lexically."""
    return (isinstance(pid, str), pid)


class CitationNetwork:
    """A validated, immutable citation DAG.  Build it with :func:`build_network`."""

    __slots__ = (
        "ids",
        "index",
        "years",
        "tags",
        "forward",
        "backward",
        "dropped_edges",
        "min_year",
        "max_year",
        "_topo",
    )

    def __init__(
        self,
        ids: tuple,
        years: tuple[int, ...],
        tags: tuple[DomainTag, ...],
        forward: tuple[tuple[int, ...], ...],
        backward: tuple[tuple[int, ...], ...],
        dropped_edges: int = 0,
        year_range: tuple[int, int] | None = None,
    ):
        self.ids = ids
        self.index = {pid: i for i, pid in enumerate(ids)}
        self.years = years
        self.tags = tags
        self.forward = forward
        self.backward = backward
        self.dropped_edges = dropped_edges
        if year_range is None:
            year_range = (min(years), max(years)) if years else (0, 0)
        self.min_year, self.max_year = year_range
        self._topo: tuple[int, ...] | None = None

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, pid: object) -> bool:
        return pid in self.index

    def __repr__(self) -> str:
        return f"CitationNetwork(nodes={len(self)}, edges={self.n_edges})"

    @property
    def n_edges(self) -> int:
        return sum(len(f) for f in self.forward)

    def record(self, pid: PatentId) -> PatentRecord:
        i = self.index[pid]
        return PatentRecord(pid, self.years[i], self.tags[i])

    def records(self) -> Iterator[PatentRecord]:
        for i, pid in enumerate(self.ids):
            yield PatentRecord(pid, self.years[i], self.tags[i])

    def edges(self) -> Iterator[CitationEdge]:
        """Edges in ascending (cited, citing) id order."""
        ids = self.ids
        for i, succ in enumerate(self.forward):
            for j in succ:
                yield CitationEdge(ids[i], ids[j])

    def edge_set(self) -> set[tuple[PatentId, PatentId]]:
        return {(e.cited, e.citing) for e in self.edges()}

    def year(self, pid: PatentId) -> int:
        return self.years[self.index[pid]]

    def fwdcit(self, pid: PatentId) -> int:
        return len(self.forward[self.index[pid]])

    def bwdcit(self, pid: PatentId) -> int:
        return len(self.backward[self.index[pid]])

    def citing(self, pid: PatentId) -> list[PatentId]:
        return [self.ids[j] for j in self.forward[self.index[pid]]]

    def cited(self, pid: PatentId) -> list[PatentId]:
        return [self.ids[j] for j in self.backward[self.index[pid]]]

    def topo_indices(self) -> tuple[int, ...]:
        """Node indices in topological order, ties by (year, id).  Cached."""
        if self._topo is None:
            self._topo = _kahn(self.years, self.forward, self.backward)
        return self._topo


def _kahn(years, forward, backward) -> tuple[int, ...]:
    indeg = [len(b) for b in backward]
    heap = [(years[i], i) for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(i)
        for j in forward[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (years[j], j))
    if len(order) != len(years):
        raise NetworkError("citation graph contains a cycle")
    return tuple(order)


def _reaches(forward: dict[int, list[int]], src: int, dst: int) -> bool:
    stack, seen = [src], {src}
    while stack:
        u = stack.pop()
        if u == dst:
            return True
        for w in forward.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def build_network(
    nodes: Iterable[PatentRecord],
    edges: Iterable[CitationEdge],
    mode: str = "strict",
    year_range: tuple[int, int] | None = None,
) -> CitationNetwork:
    """Validate ``nodes``/``edges`` and return an immutable network.

    ``strict`` requires every edge to strictly increase the year and rejects
    duplicates.  ``ingest`` keeps same-year edges unless they would close a
    cycle, and drops (counting) backwards-in-time, cycle-closing and
    duplicate edges.
    """
    if mode not in ("strict", "ingest"):
        raise ValueError(f"unknown mode {mode!r}")
    nodes = list(nodes)
    order = sorted(range(len(nodes)), key=lambda k: id_key(nodes[k].id))
    ids = tuple(nodes[k].id for k in order)
    for a, b in zip(ids, ids[1:]):
        if a == b:
            raise NetworkError(f"duplicate patent id {a!r}")
    years = tuple(int(nodes[k].year) for k in order)
    tags = tuple(DomainTag(nodes[k].domain_tag) for k in order)
    if year_range is not None:
        lo, hi = year_range
        for pid, y in zip(ids, years):
            if not lo <= y <= hi:
                raise NetworkError(f"patent {pid!r} year {y} outside [{lo}, {hi}]")
    index = {pid: i for i, pid in enumerate(ids)}

    fwd: list[list[int]] = [[] for _ in ids]
    bwd: list[list[int]] = [[] for _ in ids]
    seen: set[tuple[int, int]] = set()
    same_year: list[tuple[int, int]] = []
    dropped = 0
    for e in edges:
        if e.cited == e.citing:
            raise NetworkError(f"self-citation on {e.cited!r}")
        try:
            u, v = index[e.cited], index[e.citing]
        except KeyError as exc:
            raise NetworkError(f"edge references unknown id {exc.args[0]!r}") from None
        if (u, v) in seen:
            if mode == "strict":
                raise NetworkError(f"duplicate edge {e.cited!r} -> {e.citing!r}")
            dropped += 1
            continue
        seen.add((u, v))
        yu, yv = years[u], years[v]
        if yv > yu:
            fwd[u].append(v)
            bwd[v].append(u)
        elif mode == "strict":
            raise NetworkError(
                f"edge {e.cited!r} ({yu}) -> {e.citing!r} ({yv}) does not increase year"
            )
        elif yv == yu:
            same_year.append((u, v))
        else:
            dropped += 1

    # Same-year edges are the only possible source of cycles.
    if same_year:
        same_year.sort()
        intra: dict[int, list[int]] = {}
        for u, v in same_year:
            if _reaches(intra, v, u):
                dropped += 1
                continue
            intra.setdefault(u, []).append(v)
            fwd[u].append(v)
            bwd[v].append(u)
    if dropped:
        logger.info("dropped %d edges while building network", dropped)

    return CitationNetwork(
        ids,
        years,
        tags,
        tuple(tuple(sorted(f)) for f in fwd),
        tuple(tuple(sorted(b)) for b in bwd),
        dropped_edges=dropped,
        year_range=year_range,
    )


def topological_order(net: CitationNetwork) -> list[PatentId]:
    """Every cited patent precedes its citers; ties by ascending year, then id."""
    return [net.ids[i] for i in net.topo_indices()]


def layer_indices(net: CitationNetwork) -> list[int]:
    layer = [1] * len(net)
    backward = net.backward
    for v in net.topo_indices():
        b = backward[v]
        if b:
            layer[v] = 1 + max(layer[u] for u in b)
    return layer


def assign_layers(net: CitationNetwork) -> dict[PatentId, int]:
    """Longest-path depth from the roots (roots are layer 1)."""
    return dict(zip(net.ids, layer_indices(net)))


def from_index_edges(
    years: Sequence[int],
    edges: Iterable[tuple[int, int]],
    ids: Sequence[PatentId] | None = None,
    tags: Sequence[DomainTag] | None = None,
    mode: str = "strict",
) -> CitationNetwork:
    """Convenience constructor from parallel year/tag lists and index pairs."""
    if ids is None:
        ids = range(len(years))
    ids = list(ids)
    tags = list(tags) if tags is not None else [DomainTag.NONE] * len(ids)
    nodes = [PatentRecord(pid, y, t) for pid, y, t in zip(ids, years, tags)]
    return build_network(nodes, (CitationEdge(ids[u], ids[v]) for u, v in edges), mode)
