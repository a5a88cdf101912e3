"""Command-line entry point: ``citelab <subcommand> ...``.

Exit codes: 0 success, 1 invalid usage or configuration, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .convergence import ConvergenceConfig, combine
from .experiment import PROFILES, ExperimentConfig, emit_report, reliability_stats, run_experiment, write_reliability
from .graph import NetworkError
from .ingest import IngestError, analyze_file, export_network, load_network
from .metrics import analyze_network
from .netgen import ConfigError, GenerationConfig, generate

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    return data


def _net_files(directory: str) -> tuple[Path, Path]:
    d = Path(directory)
    nodes, edges = d / "nodes.csv", d / "edges.csv"
    for f in (nodes, edges):
        if not f.is_file():
            raise UsageError(f"missing input file: {f}")
    return nodes, edges


def cmd_generate(args) -> int:
    cfg = GenerationConfig.from_dict(_read_json(args.config))
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    cfg.validate()
    net, trace = generate(cfg)
    out = Path(args.out)
    export_network(net, out)
    (out / "trace.json").write_text(json.dumps(trace.to_dict(), indent=2) + "\n", encoding="utf-8")
    write_reliability(reliability_stats(net), out / "reliability.csv")
    return EXIT_OK


def _combine_configs(data: dict) -> tuple[ConvergenceConfig, GenerationConfig | None]:
    if "convergence" in data or "generation" in data:
        extra = set(data) - {"convergence", "generation"}
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown key")
        conv = ConvergenceConfig.from_dict(data.get("convergence", {}))
        gen = GenerationConfig.from_dict(data["generation"]) if "generation" in data else None
        return conv, gen
    return ConvergenceConfig.from_dict(data), None


def cmd_combine(args) -> int:
    conv, gen = _combine_configs(_read_json(args.config))
    if args.seed is not None:
        conv = dataclasses.replace(conv, seed=args.seed)
    net_a, _ = load_network(*_net_files(args.net_a))
    net_b, _ = load_network(*_net_files(args.net_b))
    if gen is None:
        gen = GenerationConfig(horizon=max(net_a.max_year, net_b.max_year, 2))
    conv.validate(gen.horizon)
    result = combine(net_a, net_b, conv, gen, np.random.default_rng(conv.seed))
    out = Path(args.out)
    export_network(result.network, out)
    (out / "discontinuity.json").write_text(
        json.dumps(result.discontinuity_info(), indent=2) + "\n", encoding="utf-8"
    )
    result.write_rewire_log(out / "rewire_log.csv")
    return EXIT_OK


def cmd_analyze(args) -> int:
    net, _ = load_network(*_net_files(args.net))
    analyze_network(net, args.tau).write(args.out, args.top_k)
    return EXIT_OK


def cmd_ingest_analyze(args) -> int:
    for f in (args.nodes, args.edges):
        if not Path(f).is_file():
            raise UsageError(f"missing input file: {f}")
    _, diag = analyze_file(args.nodes, args.edges, args.tau, args.out, args.top_k)
    (Path(args.out) / "diagnostics.json").write_text(
        json.dumps(dataclasses.asdict(diag), indent=2) + "\n", encoding="utf-8"
    )
    return EXIT_OK


def cmd_experiment(args) -> int:
    data = _read_json(args.config)
    if args.profile is not None:
        data["profile"] = args.profile
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.workers is not None:
        data["workers"] = args.workers
    cfg = ExperimentConfig.from_dict(data)
    summary = run_experiment(cfg)
    emit_report(summary, args.out)
    if summary.failed:
        print(f"{summary.failed} replication(s) failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _tau(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("tau must lie in (0, 1]")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="citelab", description="Patent citation network lab.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate a synthetic citation network")
    p.add_argument("--config", required=True, help="GenerationConfig JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_seed, help="override the config seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("combine", help="fuse two networks at a designed discontinuity")
    p.add_argument("--config", required=True, help="ConvergenceConfig JSON")
    p.add_argument("--net-a", required=True, help="directory with nodes.csv and edges.csv")
    p.add_argument("--net-b", required=True, help="directory with nodes.csv and edges.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_seed, help="override the config seed")
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("analyze", help="persistence, main paths and metrics of a network")
    p.add_argument("--net", required=True, help="directory with nodes.csv and edges.csv")
    p.add_argument("--tau", type=_tau, default=0.5, help="HPP threshold (default 0.5)")
    p.add_argument("--top-k", type=int, default=15, help="rows per metric in top_k.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("experiment", help="Monte Carlo identification experiment")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--profile", choices=PROFILES, help="quick caps large sizes at 20 replications")
    p.add_argument("--seed", type=_seed, help="override master_seed")
    p.add_argument("--workers", type=int, help="parallel replications")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("ingest-analyze", help="analyze a real citation export")
    p.add_argument("--nodes", required=True, help="CSV with patent_id,year[,title]")
    p.add_argument("--edges", required=True, help="CSV with citing_id,cited_id")
    p.add_argument("--tau", type=_tau, default=0.5, help="HPP threshold (default 0.5)")
    p.add_argument("--top-k", type=int, default=15, help="rows per metric in top_k.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ingest_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError, IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NetworkError, OSError, ValueError, RuntimeError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
