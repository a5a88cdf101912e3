"""Load citation data from CSV exports and run the metric pipeline on it.

Nodes: ``patent_id,year[,title]``.  Edges: ``citing_id,cited_id``.  Edges that
reference a patent outside the node file are dropped and counted, as are
duplicate edge rows.  Ids that are all canonical integers are read as ints.
"""
from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .graph import CitationEdge, CitationNetwork, PatentId, PatentRecord, build_network, id_key
from .metrics import Analysis, analyze_network

logger = logging.getLogger(__name__)

NODE_HEADERS = (["patent_id", "year"], ["patent_id", "year", "title"])
EDGE_HEADER = ["citing_id", "cited_id"]
PLAUSIBLE_YEARS = (1790, 2100)
_CANONICAL_INT = re.compile(r"-?(0|[1-9][0-9]*)")


class IngestError(ValueError):
    """Malformed input file."""


@dataclass(frozen=True)
class NodeRow:
    patent_id: str
    year: int
    title: Optional[str] = None


@dataclass(frozen=True)
class EdgeRow:
    citing_id: str
    cited_id: str


@dataclass
class DiagnosticCounts:
    nodes: int = 0
    edges_read: int = 0
    dropped_external: int = 0
    duplicate_edges: int = 0
    implausible_years: int = 0
    dropped_on_build: int = 0


def _rows(path: Path, allowed: tuple[list[str], ...]) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError(f"{path}: missing header")
        header = [h.strip() for h in header]
        if header not in allowed:
            expected = " or ".join(",".join(a) for a in allowed)
            raise IngestError(f"{path}: header {','.join(header)!r}, expected {expected}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise IngestError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            rows.append(row)
    return header, rows


def load_csv(
    nodes_path: str | Path, edges_path: str | Path
) -> tuple[list[NodeRow], list[EdgeRow], DiagnosticCounts]:
    """Parse both files; external edges and duplicates are dropped and counted."""
    diag = DiagnosticCounts()
    _, node_rows = _rows(Path(nodes_path), NODE_HEADERS)
    nodes = []
    for row in node_rows:
        pid = row[0].strip()
        if not pid:
            raise IngestError(f"{nodes_path}: empty patent_id")
        try:
            year = int(row[1].strip())
        except ValueError:
            raise IngestError(f"{nodes_path}: unparsable year {row[1]!r} for {pid}") from None
        if not PLAUSIBLE_YEARS[0] <= year <= PLAUSIBLE_YEARS[1]:
            diag.implausible_years += 1
        nodes.append(NodeRow(pid, year, row[2] if len(row) > 2 else None))
    diag.nodes = len(nodes)
    if diag.implausible_years:
        logger.info("%d patents have a year outside %d-%d", diag.implausible_years, *PLAUSIBLE_YEARS)

    known = {n.patent_id for n in nodes}
    _, edge_rows = _rows(Path(edges_path), (EDGE_HEADER,))
    edges = []
    seen = set()
    for row in edge_rows:
        citing, cited = row[0].strip(), row[1].strip()
        if not citing or not cited:
            raise IngestError(f"{edges_path}: empty id in edge row")
        diag.edges_read += 1
        if citing not in known or cited not in known:
            diag.dropped_external += 1
            continue
        if (citing, cited) in seen:
            diag.duplicate_edges += 1
            continue
        seen.add((citing, cited))
        edges.append(EdgeRow(citing, cited))
    return nodes, edges, diag


def _id_parser(tokens):
    if all(_CANONICAL_INT.fullmatch(t) for t in tokens):
        return int
    return str


def to_network(nodes: list[NodeRow], edges: list[EdgeRow], diag: DiagnosticCounts | None = None) -> CitationNetwork:
    """Build an ingest-mode network (same-year edges kept unless cyclic)."""
    conv = _id_parser([n.patent_id for n in nodes])
    net = build_network(
        (PatentRecord(conv(n.patent_id), n.year) for n in nodes),
        (CitationEdge(conv(e.cited_id), conv(e.citing_id)) for e in edges),
        mode="ingest",
    )
    if diag is not None:
        diag.dropped_on_build = net.dropped_edges
    return net


def load_network(nodes_path: str | Path, edges_path: str | Path) -> tuple[CitationNetwork, DiagnosticCounts]:
    nodes, edges, diag = load_csv(nodes_path, edges_path)
    return to_network(nodes, edges, diag), diag


def export_network(net: CitationNetwork, out_dir: str | Path, titles: dict[PatentId, str] | None = None) -> None:
    """Write ``nodes.csv`` and ``edges.csv`` in the ingest format."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "nodes.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NODE_HEADERS[1] if titles else NODE_HEADERS[0])
        for rec in net.records():
            row = [rec.id, rec.year]
            if titles:
                row.append(titles.get(rec.id, ""))
            w.writerow(row)
    with open(out / "edges.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        for e in sorted(net.edges(), key=lambda e: (id_key(e.citing), id_key(e.cited))):
            w.writerow([e.citing, e.cited])


def analyze_file(
    nodes_path: str | Path,
    edges_path: str | Path,
    tau: float = 0.5,
    out_dir: str | Path | None = None,
    top_k: int = 15,
) -> tuple[Analysis, DiagnosticCounts]:
    """Load, analyze and optionally write the report files to ``out_dir``."""
    net, diag = load_network(nodes_path, edges_path)
    analysis = analyze_network(net, tau)
    if out_dir is not None:
        analysis.write(out_dir, top_k)
    return analysis, diag
