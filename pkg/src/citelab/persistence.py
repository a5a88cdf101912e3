"""Knowledge persistence by genetic inheritance over the citation DAG.

Every citing patent inherits its traceable knowledge in equal parts from the
patents it cites.  The persistence of a patent is the total share of its
knowledge found in the frontier (sink) patents of the network.  Following the
inheritance backwards from each sink gives a linear-time recursion::

    u(j) = [j is a sink] + (1 - alpha) * sum(u(k) / BWDCIT(k) for k citing j)
    P(j) = u(j) - [j is a sink]

``alpha`` is an optional own-novelty weight; with ``alpha = 0`` a citing
patent's genome is entirely inherited.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .graph import CitationNetwork, PatentId, layer_indices

ORACLE_MAX_NODES = 20


@dataclass(frozen=True)
class PersistenceTable:
    raw: dict[PatentId, float]
    normalized: dict[PatentId, float]
    hpp: frozenset
    threshold: float

    def to_csv(self, path: str | Path, net: CitationNetwork, layers: dict[PatentId, int]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "year", "layer", "raw", "normalized", "is_hpp"])
            for pid in net.ids:
                w.writerow([
                    pid,
                    net.year(pid),
                    layers[pid],
                    repr(self.raw[pid]),
                    repr(self.normalized[pid]),
                    int(pid in self.hpp),
                ])


def persistence_array(net: CitationNetwork, alpha: float = 0.0) -> list[float]:
    """Raw persistence indexed by internal node index."""
    forward, backward = net.forward, net.backward
    keep = 1.0 - alpha
    u = [0.0] * len(net)
    for j in reversed(net.topo_indices()):
        succ = forward[j]
        if not succ:
            u[j] = 1.0
            continue
        acc = 0.0
        for k in succ:
            acc += u[k] / len(backward[k])
        u[j] = keep * acc
    for j, succ in enumerate(forward):
        if not succ:
            u[j] = 0.0
    return u


def persistence_scores(net: CitationNetwork, alpha: float = 0.0) -> dict[PatentId, float]:
    return dict(zip(net.ids, persistence_array(net, alpha)))


def _check_small(net: CitationNetwork) -> None:
    if len(net) > ORACLE_MAX_NODES:
        raise ValueError(
            f"path enumeration refused for {len(net)} nodes (limit {ORACLE_MAX_NODES})"
        )


def genome_oracle(net: CitationNetwork, i: PatentId, s: PatentId, alpha: float = 0.0) -> float:
    """Inheritance weight of ``i`` in ``s`` by explicit enumeration of every path.

    Each step into a patent ``v`` multiplies by ``(1 - alpha) / BWDCIT(v)``.
    The empty path gives ``g(i, i) = 1``.
    """
    _check_small(net)
    src, dst = net.index[i], net.index[s]
    total = 0.0
    stack = [(src, 1.0)]
    while stack:
        v, w = stack.pop()
        if v == dst:
            total += w
            continue
        for k in net.forward[v]:
            stack.append((k, w * (1.0 - alpha) / len(net.backward[k])))
    return total


def genome_shares(net: CitationNetwork, j: PatentId, alpha: float = 0.0) -> dict[PatentId, float]:
    """Composition of ``j``'s genome by originating patent (oracle, small nets).

    A root's genome is entirely its own gene; any other patent keeps ``alpha``
    as its own gene and inherits the rest.  Shares over ``j`` and its
    ancestors sum to one.
    """
    _check_small(net)
    target = net.index[j]
    shares = {}
    for pid in net.ids:
        g = genome_oracle(net, pid, j, alpha)
        if g == 0.0:
            continue
        own = 1.0 if not net.backward[net.index[pid]] else alpha
        shares[pid] = own * g
    if not net.backward[target]:
        shares[j] = 1.0
    return shares


def normalize_and_select(
    raw: dict[PatentId, float], layers: dict[PatentId, int], tau: float = 0.5
) -> PersistenceTable:
    """Scale persistence by the maximum of each layer and flag patents at or above ``tau``."""
    if not 0 < tau <= 1:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    layer_max: dict[int, float] = {}
    for pid, p in raw.items():
        lay = layers[pid]
        if p > layer_max.get(lay, 0.0):
            layer_max[lay] = p
    normalized = {}
    for pid, p in raw.items():
        m = layer_max.get(layers[pid], 0.0)
        normalized[pid] = p / m if m > 0 else 0.0
    hpp = frozenset(pid for pid, v in normalized.items() if v > 0 and v >= tau)
    return PersistenceTable(dict(raw), normalized, hpp, tau)


def compute_persistence(
    net: CitationNetwork, tau: float = 0.5, alpha: float = 0.0
) -> tuple[PersistenceTable, dict[PatentId, int]]:
    layers = dict(zip(net.ids, layer_indices(net)))
    return normalize_and_select(persistence_scores(net, alpha), layers, tau), layers
