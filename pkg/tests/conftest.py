import pytest
from hypothesis import strategies as st

from citelab.graph import CitationEdge, PatentRecord, build_network, from_index_edges


@pytest.fixture
def diamond():
    nodes = [PatentRecord("A", 1), PatentRecord("B", 2), PatentRecord("C", 2), PatentRecord("D", 3)]
    edges = [CitationEdge("A", "B"), CitationEdge("A", "C"), CitationEdge("B", "D"), CitationEdge("C", "D")]
    return build_network(nodes, edges)


@pytest.fixture
def chain():
    return from_index_edges([1, 2, 3], [(0, 1), (1, 2)], ids=["A", "B", "C"])


@st.composite
def random_dags(draw, max_nodes=15):
    """Small DAGs with strictly increasing years along every edge."""
    n = draw(st.integers(1, max_nodes))
    years = sorted(draw(st.lists(st.integers(1, 8), min_size=n, max_size=n)))
    density = draw(st.floats(0.0, 1.0))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if years[u] < years[v]]
    mask = draw(st.lists(st.floats(0, 1), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, x in zip(pairs, mask) if x < density]
    return from_index_edges(years, edges)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
