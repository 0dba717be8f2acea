import io
import math

import numpy as np
import pytest

from gravrec.corpus import generate_synthetic
from gravrec.hetnet import COLLABORATION, COTOPIC, RelationGraph, build_network
from gravrec.influence import (DISTANCE_COLLABORATION, DomainError,
                               MissingEdge, academic_distance, build_table,
                               build_tables, dump_tables, gravity_force,
                               influence_factor)
from gravrec.numkernel import softmax_vec


def path_graph(weights=(2, 1)):
    return RelationGraph(COLLABORATION, ["a", "b", "c"], {
        ("a", "b"): weights[0],
        ("b", "c"): weights[1]
    })


def test_distance_reciprocal():
    graph = path_graph()
    assert academic_distance(graph, "a", "b") == 0.5
    assert academic_distance(graph, "b", "c") == 1.0
    assert academic_distance(graph, "b", "a") == academic_distance(
        graph, "a", "b")


def test_distance_missing_edge():
    with pytest.raises(MissingEdge):
        academic_distance(path_graph(), "a", "c")


def test_influence_factor():
    assert influence_factor(100, 0.5, 1.0) == 400.0
    assert influence_factor(0, 0.5) == 0.0
    with pytest.raises(DomainError):
        influence_factor(3, 0.0)
    with pytest.raises(DomainError):
        influence_factor(3, -1.0)


def test_force_over_mass_is_factor():
    for m_i, m_j, r, G in ((3, 100, 0.5, 1.0), (7, 2, 1.0, 2.5),
                           (1, 0, 0.25, 1.0)):
        assert gravity_force(m_i, m_j, r, G) / m_i == pytest.approx(
            influence_factor(m_j, r, G), rel=1e-12)


def test_equal_g_gives_half():
    graph = path_graph((1, 1))
    table = build_table(graph, {"a": 5, "b": 1, "c": 5})
    assert table.M[("b", "a")] == pytest.approx(0.5)
    assert table.M[("b", "c")] == pytest.approx(0.5)


def test_softmax_of_one_and_zero():
    graph = path_graph((1, 1))
    table = build_table(graph, {"a": 1, "b": 0, "c": 0})
    e = math.e
    assert table.g[("b", "a")] == 1.0
    assert table.g[("b", "c")] == 0.0
    assert table.M[("b", "a")] == pytest.approx(e / (e + 1), abs=1e-12)
    assert table.M[("b", "c")] == pytest.approx(1 / (e + 1), abs=1e-12)


def test_single_neighbor_gets_one():
    table = build_table(path_graph(), {"a": 3, "b": 4, "c": 9})
    assert table.M[("a", "b")] == 1.0
    assert table.row("a") == (["b"], [1.0])


def test_isolated_row_empty():
    graph = RelationGraph(COLLABORATION, ["a", "b", "z"], {("a", "b"): 1})
    table = build_table(graph, {"a": 1, "b": 1, "z": 1})
    assert table.row("z") == ([], [])


def test_large_g_no_overflow():
    graph = path_graph((1, 1))
    table = build_table(graph, {"a": 1000000, "b": 1, "c": 999999})
    assert table.M[("b", "a")] == pytest.approx(1 / (1 + math.exp(-1)))
    assert all(math.isfinite(m) for m in table.M.values())


def test_underflowed_neighbor_stays_positive():
    # g gap of 1000 puts exp far below the smallest double
    table = build_table(path_graph((1, 1)), {"a": 1000, "b": 1, "c": 0})
    nbrs, ms = table.row("b")
    assert nbrs == ["a", "c"]
    assert ms[0] == 1.0
    assert 0.0 < ms[1] < 1e-300
    assert abs(sum(ms) - 1.0) <= 1e-9


def test_planted_rows_positive():
    corpus = generate_synthetic(4, 25, 6, 0.9, 7)
    network = build_network(corpus)
    for table in build_tables(network, corpus.citation_mass):
        coefficients = table.edge_coefficients()
        assert len(coefficients)
        assert coefficients.min() > 0
        for i in network.nodes:
            nbrs, ms = table.row(i)
            if nbrs:
                assert abs(sum(ms) - 1.0) <= 1e-9


def synthetic_tables(G=1.0, distance_source='relation'):
    corpus = generate_synthetic(3, 8, 4, 0.8, 13)
    network = build_network(corpus)
    return corpus, network, build_tables(network, corpus.citation_mass, G,
                                         distance_source)


def test_rows_stochastic_and_asymmetry():
    corpus, network, tables = synthetic_tables()
    mass = corpus.citation_mass
    for graph, table in zip(network.graphs, tables):
        for i in graph.nodes:
            nbrs, ms = table.row(i)
            if nbrs:
                assert abs(sum(ms) - 1.0) <= 1e-9
                assert min(ms) > 0
            for j in nbrs:
                assert (i, j) in table.g and (j, i) in table.g
                if mass[i] > 0 and mass[j] > 0:
                    assert table.g[(i, j)] / table.g[(j, i)] == pytest.approx(
                        mass[j] / mass[i], rel=1e-9)


def test_shift_invariance():
    g = np.array([0.3, 2.0, 5.5])
    assert np.allclose(softmax_vec(g), softmax_vec(g + 17.0), atol=1e-12)


def test_scaling_G_changes_unequal_rows_only():
    graph = RelationGraph(COLLABORATION, ["a", "b", "c", "d"], {
        ("a", "b"): 1,
        ("a", "c"): 1,
        ("d", "b"): 1,
        ("d", "c"): 1
    })
    # a sees b and c with unequal g
    mass = {"a": 1, "b": 1, "c": 2, "d": 1}
    t1 = build_table(graph, mass, 1.0)
    t2 = build_table(graph, mass, 3.0)
    assert t1.M[("a", "b")] != pytest.approx(t2.M[("a", "b")])
    equal_graph = path_graph((1, 1))
    equal_mass = {"a": 4, "b": 1, "c": 4}
    assert build_table(equal_graph, equal_mass, 1.0).M[("b", "a")] == \
        pytest.approx(build_table(equal_graph, equal_mass, 9.0).M[("b", "a")])


def test_collaboration_distance_zeroes_non_collaborators():
    corpus, network, tables = synthetic_tables(
        distance_source=DISTANCE_COLLABORATION)
    collab = network.graph(COLLABORATION)
    table = tables[network.kinds().index(COTOPIC)]
    for (i, j), g in table.g.items():
        if collab.weight(i, j) is None:
            assert g == 0.0


def test_edge_coefficients_follow_csr():
    _corpus, network, tables = synthetic_tables()
    graph = network.graphs[0]
    indptr, indices = graph.csr()
    coefs = tables[0].edge_coefficients()
    assert len(coefs) == len(indices)
    for i, node in enumerate(graph.nodes):
        for e in range(indptr[i], indptr[i + 1]):
            assert coefs[e] == tables[0].M[(node, graph.nodes[indices[e]])]


def test_dump_tables_lines():
    _corpus, network, tables = synthetic_tables()
    fd = io.StringIO()
    dump_tables(tables, fd)
    lines = fd.getvalue().splitlines()
    assert len(lines) == sum(len(t.g) for t in tables)
    kind, i, j, g, m = lines[0].split()
    assert float(g) >= 0
    assert 0 < float(m) <= 1
