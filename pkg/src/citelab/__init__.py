"""Citation-network lab: synthetic patent networks, knowledge persistence,
main paths and discontinuity metrics."""
from .convergence import CombinedNetwork, ConvergenceConfig, combine
from .experiment import ExperimentConfig, emit_report, reliability_stats, run_experiment, run_replication
from .graph import (
    CitationEdge,
    CitationNetwork,
    DomainTag,
    NetworkError,
    PatentRecord,
    assign_layers,
    build_network,
    topological_order,
)
from .ingest import analyze_file, export_network, load_csv, load_network
from .mainpath import MainPathGraph, build_segments
from .metrics import MetricReport, analyze_network, compute_metrics, rank
from .netgen import ConfigError, GenerationConfig, generate
from .persistence import PersistenceTable, compute_persistence, persistence_scores

__version__ = "0.1.0"

__all__ = [
    "CitationEdge", "CitationNetwork", "CombinedNetwork", "ConfigError", "ConvergenceConfig",
    "DomainTag", "ExperimentConfig", "GenerationConfig", "MainPathGraph", "MetricReport",
    "NetworkError", "PatentRecord", "PersistenceTable", "analyze_file", "analyze_network",
    "assign_layers", "build_network", "build_segments", "combine", "compute_metrics",
    "compute_persistence", "emit_report", "export_network", "generate", "load_csv",
    "load_network", "persistence_scores", "rank", "reliability_stats", "run_experiment",
    "run_replication", "topological_order",
]
