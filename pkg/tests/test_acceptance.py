"""Acceptance criteria.  Each criterion prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are repeated
in the terminal summary) or as a script: ``python tests/test_acceptance.py``.
"""
import json
import sys

import numpy as np
import pytest

from citelab.cli import main as cli_main
from citelab.experiment import ExperimentConfig, reliability_stats, run_experiment
from citelab.graph import PatentRecord, CitationEdge, build_network, from_index_edges
from citelab.ingest import analyze_file, export_network
from citelab.metrics import METRICS, analyze_network, metric3, metric4
from citelab.netgen import GenerationConfig, generate
from citelab.persistence import genome_oracle, genome_shares, persistence_scores

# Tolerances
GROWTH_TARGET, GROWTH_TOL = 0.05, 0.01
SLOPE_TARGET, SLOPE_TOL = -0.5, 0.1
RHO_MIN_RUNS = 90
ORACLE_TOL = 1e-9
M3_TARGET, M3_REL = 32_192.88, 0.005
M4_TARGET, M4_REL = 1.05, 0.01
K_GROUPS = (1, 3, 5, 10, 30, 50)
M5_TOP3_MIN = 0.85
M2_TOP1_RANGE = (0.10, 0.50)
SCALE_M5_TOP3_MIN = 0.8

RESULTS: list[str] = []


def report(number: int, name: str, passed: bool, detail: str) -> None:
    line = f"CRITERION {number} {'PASS' if passed else 'FAIL'} {name}: {detail}"
    RESULTS.append(line)
    print(line)


def random_dag_batch(count=200, max_nodes=15, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_nodes + 1))
        years = np.sort(rng.integers(1, 9, size=n)).tolist()
        density = rng.random()
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if years[u] < years[v] and rng.random() < density]
        out.append(from_index_edges(years, edges))
    return out


def ordering_violations(summary, size):
    bad = []
    for k in K_GROUPS:
        m5 = summary.probability(size, "m5", k)
        for m in METRICS[:4]:
            if summary.probability(size, m, k) > m5:
                bad.append(f"k={k}:{m}")
    return bad


def table(summary, size):
    return " ".join(
        f"{m}=[" + ",".join(f"{summary.probability(size, m, k):.2f}" for k in K_GROUPS) + "]"
        for m in METRICS
    )


def test_c1_generator_reliability():
    growth, slope, positive = [], [], 0
    for seed in range(100):
        net, _ = generate(GenerationConfig(n=1000, seed=seed))
        st = reliability_stats(net)
        growth.append(st.growth_rate)
        slope.append(st.rank_slope)
        positive += st.backward_trend_rho is not None and st.backward_trend_rho > 0
    g, s = float(np.mean(growth)), float(np.mean(slope))
    ok_g = abs(g - GROWTH_TARGET) <= GROWTH_TOL
    ok_s = abs(s - SLOPE_TARGET) <= SLOPE_TOL
    ok_r = positive >= RHO_MIN_RUNS
    report(1, "generator reliability", ok_g and ok_s and ok_r,
           f"growth={g:.4f} slope={s:.4f} rho>0 in {positive}/100")
    assert ok_g and ok_s and ok_r


def test_c2_persistence_oracle():
    worst = 0.0
    for net in random_dag_batch():
        fast = persistence_scores(net)
        sinks = [x for x in net.ids if net.fwdcit(x) == 0]
        for i in net.ids:
            slow = sum(genome_oracle(net, i, s) for s in sinks if s != i)
            worst = max(worst, abs(fast[i] - slow))
    report(2, "persistence oracle equivalence", worst <= ORACLE_TOL, f"max |diff| = {worst:.2e} over 200 DAGs")
    assert worst <= ORACLE_TOL


def test_c3_genome_conservation():
    worst, checked = 0.0, 0
    for net in random_dag_batch():
        for j in net.ids:
            if net.bwdcit(j):
                worst = max(worst, abs(sum(genome_shares(net, j).values()) - 1.0))
                checked += 1
    report(3, "genome conservation", worst <= ORACLE_TOL, f"max |sum-1| = {worst:.2e} over {checked} non-roots")
    assert worst <= ORACLE_TOL


def _convergence_fixture(k):
    """k HPP parents cited directly by h; h is cited by one sink."""
    nodes = [PatentRecord(f"a{i}", 1) for i in range(k)] + [PatentRecord("h", 2), PatentRecord("s", 3)]
    edges = [CitationEdge(f"a{i}", "h") for i in range(k)] + [CitationEdge("h", "s")]
    return build_network(nodes, edges)


def test_c4_metric_formulas():
    m3 = metric3(196, 164.25)
    m4 = metric4(0.488)
    ok3 = abs(m3 - M3_TARGET) <= M3_REL * M3_TARGET
    ok4 = abs(m4 - M4_TARGET) <= M4_REL * M4_TARGET
    ok5 = True
    for k in (1, 2, 3):
        r = analyze_network(_convergence_fixture(k)).report["h"]
        ok5 &= r.path == k and r.m5 == k / (1 + r.bwdcit + k) * r.p and r.p > 0
    report(4, "metric formula fidelity", ok3 and ok4 and ok5,
           f"m3={m3:.2f} m4={m4:.4f} m5 ratio exact for PATH 1..3: {ok5}")
    assert ok3 and ok4 and ok5


@pytest.fixture(scope="module")
def identification():
    cfg = ExperimentConfig(sizes=(600, 1000), replications=100, profile="quick", master_seed=0)
    return run_experiment(cfg)


def test_c5_discontinuity_identification(identification):
    s = identification
    bad = {size: ordering_violations(s, size) for size in (600, 1000)}
    ok_a = not any(bad.values())
    top3 = {size: s.probability(size, "m5", 3) for size in (600, 1000)}
    ok_b = all(v >= M5_TOP3_MIN for v in top3.values())
    ok_c = all(s.probability(size, "m4", 50) < top3[size] for size in (600, 1000))
    m2_top1 = s.probability(1000, "m2", 1)
    ok_d = M2_TOP1_RANGE[0] <= m2_top1 <= M2_TOP1_RANGE[1]
    detail = (
        f"(a) ordering {'ok' if ok_a else 'violated ' + str(bad)}; "
        f"(b) m5 top3 600={top3[600]:.2f} 1000={top3[1000]:.2f}; "
        f"(c) m4 top50 600={s.probability(600, 'm4', 50):.2f} 1000={s.probability(1000, 'm4', 50):.2f}; "
        f"(d) m2 top1 1000={m2_top1:.2f}; failed={s.failed}; "
        f"n=600 {table(s, 600)}; n=1000 {table(s, 1000)}"
    )
    passed = ok_a and ok_b and ok_c and ok_d and s.failed == 0
    report(5, "discontinuity identification", passed, detail)
    assert passed


def test_c6_scale_robustness():
    cfg = ExperimentConfig(sizes=(2000, 10000), replications=20, profile="quick", master_seed=0)
    s = run_experiment(cfg)
    bad = {size: ordering_violations(s, size) for size in cfg.sizes}
    top3 = {size: s.probability(size, "m5", 3) for size in cfg.sizes}
    ok_a = not any(bad.values())
    ok_b = all(v >= SCALE_M5_TOP3_MIN for v in top3.values())
    passed = ok_a and ok_b and s.failed == 0
    report(6, "scale robustness", passed,
           f"ordering {'ok' if ok_a else 'violated ' + str(bad)}; m5 top3 "
           + " ".join(f"{k}={v:.2f}" for k, v in top3.items())
           + f"; n=2000 {table(s, 2000)}; n=10000 {table(s, 10000)}")
    assert passed


def test_c7_determinism(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"sizes": [600, 1000], "replications": 5, "master_seed": 17}))
    codes = [cli_main(["experiment", "--config", str(cfg), "--out", str(tmp_path / d)]) for d in ("r1", "r2")]
    same = (tmp_path / "r1" / "fig11.csv").read_bytes() == (tmp_path / "r2" / "fig11.csv").read_bytes()
    passed = codes == [0, 0] and same
    report(7, "determinism", passed, f"exit codes {codes}, fig11.csv identical: {same}")
    assert passed


def test_c8_ingest_round_trip(tmp_path):
    net, _ = generate(GenerationConfig(n=1000, seed=8))
    export_network(net, tmp_path)
    analysis, diag = analyze_file(tmp_path / "nodes.csv", tmp_path / "edges.csv")
    same = analysis.report == analyze_network(net).report
    report(8, "ingest round-trip", same, f"reports identical: {same}; dropped={diag.dropped_external}")
    assert same


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
