import json
import subprocess
import sys

import pytest

from citelab.cli import main


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def gen_cfg(tmp_path):
    p = tmp_path / "gen.json"
    p.write_text(json.dumps({"n": 300}))
    return p


def test_generate_files_and_determinism(tmp_path, gen_cfg):
    assert run("generate", "--config", gen_cfg, "--out", tmp_path / "a", "--seed", 4) == 0
    assert run("generate", "--config", gen_cfg, "--out", tmp_path / "b", "--seed", 4) == 0
    names = {"nodes.csv", "edges.csv", "trace.json", "reliability.csv"}
    assert {p.name for p in (tmp_path / "a").iterdir()} == names
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_generate_invalid_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 0}')
    assert run("generate", "--config", bad, "--out", tmp_path / "x") == 1
    assert "n:" in capsys.readouterr().err


def test_combine_and_analyze(tmp_path, gen_cfg):
    run("generate", "--config", gen_cfg, "--out", tmp_path / "a", "--seed", 1)
    run("generate", "--config", gen_cfg, "--out", tmp_path / "b", "--seed", 2)
    conv = tmp_path / "conv.json"
    conv.write_text("{}")
    assert run("combine", "--config", conv, "--net-a", tmp_path / "a", "--net-b", tmp_path / "b",
               "--out", tmp_path / "ab", "--seed", 3) == 0
    info = json.loads((tmp_path / "ab" / "discontinuity.json").read_text())
    assert info["id"] == 0 and info["year"] == 15
    assert (tmp_path / "ab" / "rewire_log.csv").exists()
    assert run("analyze", "--net", tmp_path / "ab", "--tau", "0.5", "--out", tmp_path / "an") == 0
    assert {p.name for p in (tmp_path / "an").iterdir()} == {
        "persistence.csv", "mainpaths.csv", "metrics.csv", "top_k.csv"
    }


def test_analyze_missing_input(tmp_path):
    assert run("analyze", "--net", tmp_path / "nope", "--out", tmp_path / "o") == 1


def test_experiment(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"sizes": [600], "replications": 2}))
    assert run("experiment", "--config", cfg, "--out", tmp_path / "e", "--profile", "quick") == 0
    assert {p.name for p in (tmp_path / "e").iterdir()} == {
        "summary.json", "fig11.csv", "fig12.csv", "reliability.csv", "ranks.csv"
    }


def test_usage_errors(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text("{}")
    with pytest.raises(SystemExit) as info:
        run("experiment", "--config", cfg, "--out", tmp_path, "--profile", "medium")
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        run("generate", "--config", cfg, "--out", tmp_path, "--bogus")
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        run("analyze", "--net", tmp_path, "--out", tmp_path, "--tau", "2")
    assert info.value.code == 1


def test_ingest_analyze(tmp_path):
    (tmp_path / "n.csv").write_text("patent_id,year\n1,2000\n2,2001\n")
    (tmp_path / "e.csv").write_text("citing_id,cited_id\n2,1\n2,9\n")
    assert run("ingest-analyze", "--nodes", tmp_path / "n.csv", "--edges", tmp_path / "e.csv",
               "--out", tmp_path / "o") == 0
    diag = json.loads((tmp_path / "o" / "diagnostics.json").read_text())
    assert diag["dropped_external"] == 1


def test_help_lists_flags():
    out = subprocess.run([sys.executable, "-m", "citelab.cli", "experiment", "--help"],
                         capture_output=True, text=True, check=True).stdout
    for flag in ("--config", "--out", "--profile", "--seed", "--workers"):
        assert flag in out
