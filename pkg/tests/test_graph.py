import pytest
from hypothesis import given

from citelab.graph import (
    CitationEdge,
    NetworkError,
    PatentRecord,
    assign_layers,
    build_network,
    from_index_edges,
    topological_order,
)

from conftest import random_dags


def test_diamond_degrees(diamond):
    assert diamond.fwdcit("A") == 2
    assert diamond.bwdcit("D") == 2
    assert diamond.n_edges == 4
    assert diamond.citing("A") == ["B", "C"]
    assert diamond.cited("D") == ["B", "C"]


def test_self_loop_rejected():
    with pytest.raises(NetworkError, match="self"):
        build_network([PatentRecord(1, 1)], [CitationEdge(1, 1)])


def test_duplicate_id_rejected():
    with pytest.raises(NetworkError, match="duplicate patent"):
        build_network([PatentRecord(1, 1), PatentRecord(1, 2)], [])


def test_unknown_id_rejected():
    with pytest.raises(NetworkError, match="unknown"):
        build_network([PatentRecord(1, 1)], [CitationEdge(1, 2)])


def test_strict_rejects_non_increasing_year():
    nodes = [PatentRecord(1, 2), PatentRecord(2, 2)]
    with pytest.raises(NetworkError):
        build_network(nodes, [CitationEdge(1, 2)])


def test_strict_rejects_duplicate_edge():
    nodes = [PatentRecord(1, 1), PatentRecord(2, 2)]
    with pytest.raises(NetworkError, match="duplicate edge"):
        build_network(nodes, [CitationEdge(1, 2), CitationEdge(1, 2)])


def test_year_range_enforced():
    with pytest.raises(NetworkError, match="outside"):
        build_network([PatentRecord(1, 40)], [], year_range=(1, 30))


def test_ingest_drops_backwards_edge():
    nodes = [PatentRecord(1, 1), PatentRecord(2, 2), PatentRecord(3, 3)]
    edges = [CitationEdge(1, 2), CitationEdge(3, 2)]
    net = build_network(nodes, edges, mode="ingest")
    assert net.edge_set() == {(1, 2)}
    assert net.dropped_edges == 1


def test_ingest_same_year_kept_unless_cycle():
    nodes = [PatentRecord(1, 5), PatentRecord(2, 5)]
    net = build_network(nodes, [CitationEdge(1, 2), CitationEdge(2, 1), CitationEdge(1, 2)], mode="ingest")
    assert net.edge_set() == {(1, 2)}
    assert net.dropped_edges == 2


def test_topological_order_examples(diamond):
    order = topological_order(diamond)
    assert order[0] == "A" and order[-1] == "D"
    empty = build_network([], [])
    assert topological_order(empty) == []
    chain = from_index_edges([1, 2, 3], [(0, 1), (1, 2)], ids=["C3", "C2", "C1"])
    assert topological_order(chain) == ["C3", "C2", "C1"]


def test_layer_examples(diamond):
    assert assign_layers(diamond) == {"A": 1, "B": 2, "C": 2, "D": 3}
    isolated = build_network([PatentRecord(1, 1), PatentRecord(2, 1)], [])
    assert assign_layers(isolated) == {1: 1, 2: 1}
    chain5 = from_index_edges([1, 2, 3, 4, 5], [(i, i + 1) for i in range(4)])
    assert assign_layers(chain5) == {i: i + 1 for i in range(5)}


def test_mixed_id_types_ordered():
    net = build_network([PatentRecord("x", 1), PatentRecord(2, 1), PatentRecord(10, 1)], [])
    assert net.ids == (2, 10, "x")


@given(random_dags())
def test_topological_order_respects_edges(net):
    pos = {pid: i for i, pid in enumerate(topological_order(net))}
    assert len(pos) == len(net)
    for e in net.edges():
        assert pos[e.cited] < pos[e.citing]


@given(random_dags())
def test_layers_are_longest_paths(net):
    layers = assign_layers(net)
    for pid in net.ids:
        back = net.cited(pid)
        expected = 1 + max((layers[c] for c in back), default=0)
        assert layers[pid] == expected


@given(random_dags())
def test_degree_sums_match_edges(net):
    assert sum(net.fwdcit(p) for p in net.ids) == net.n_edges
    assert sum(net.bwdcit(p) for p in net.ids) == net.n_edges
