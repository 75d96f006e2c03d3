import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwsearch.graph import (
    Graph,
    adjacency_matrix,
    complete_graph,
    laplacian,
    load_edge_list,
    star_graph,
    write_edge_list,
)


def test_complete_graph_small_laplacian():
    lap = laplacian(complete_graph(3))
    assert np.array_equal(lap, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])


def test_complete_graph_edge_count():
    assert complete_graph(10).num_links == 45


def test_complete_graph_rejects_small_order():
    with pytest.raises(ValueError):
        complete_graph(1)


def test_star_graph_small_laplacian():
    lap = laplacian(star_graph(3))
    assert np.array_equal(lap, [[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])


def test_star_graph_degrees():
    deg = star_graph(10).degrees()
    assert deg[0] == 9
    assert np.all(deg[1:] == 1)


def test_star_graph_external_target():
    g = star_graph(5, "external")
    assert g.target == 1
    assert g.degrees()[g.target] == 1


def test_star_graph_central_target_is_hub():
    assert star_graph(7, "central").target == 0


def test_star_graph_rejects_small_order():
    with pytest.raises(ValueError):
        star_graph(2)


def test_star_graph_rejects_unknown_kind():
    with pytest.raises(ValueError):
        star_graph(5, "middle")


def test_complete_laplacian_spectrum():
    evals = np.linalg.eigvalsh(laplacian(complete_graph(4)))
    assert np.allclose(evals, [0, 4, 4, 4], atol=1e-12)


def test_star_laplacian_spectrum():
    evals = np.linalg.eigvalsh(laplacian(star_graph(4)))
    assert np.allclose(evals, [0, 1, 1, 4], atol=1e-12)


def test_builders_match_explicit_edge_lists():
    n = 6
    complete_edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    assert complete_graph(n).edges == Graph(n, complete_edges).edges
    star_edges = tuple((0, j) for j in range(1, n))
    assert star_graph(n).edges == Graph(n, star_edges).edges


def test_edges_canonicalized():
    g = Graph(3, ((2, 0), (1, 0), (2, 1)))
    assert g.edges == ((0, 1), (0, 2), (1, 2))


@pytest.mark.parametrize("g", [complete_graph(5), star_graph(6), Graph(4, ((0, 1), (1, 2), (2, 3)))])
def test_laplacian_invariants(g):
    lap = laplacian(g)
    assert np.array_equal(lap, lap.T)
    assert np.array_equal(lap.sum(axis=0), np.zeros(g.n))
    assert np.array_equal(lap @ np.ones(g.n), np.zeros(g.n))
    assert np.array_equal(np.diag(lap), g.degrees())
    off = lap - np.diag(np.diag(lap))
    assert set(np.unique(off)) <= {0.0, -1.0}
    assert np.linalg.eigvalsh(lap).min() > -1e-12


@given(
    n=st.integers(min_value=2, max_value=12),
    extra=st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=20),
    data=st.data(),
)
@settings(max_examples=50, deadline=None)
def test_random_connected_graph_laplacian(n, extra, data):
    # Random spanning tree plus extra edges: always connected.
    edges = {(data.draw(st.integers(0, j - 1)), j) for j in range(1, n)}
    for i, j in extra:
        if i < n and j < n and i != j:
            edges.add((min(i, j), max(i, j)))
    g = Graph(n, tuple(edges))
    lap = laplacian(g)
    assert np.array_equal(lap.sum(axis=0), np.zeros(n))
    assert np.array_equal(lap, lap.T)
    assert np.linalg.eigvalsh(lap).min() > -1e-9


@pytest.mark.parametrize(
    "edges",
    [((0, 0),), ((0, 1), (1, 0)), ((0, 5),)],
    ids=["self-loop", "duplicate", "out-of-range"],
)
def test_bad_edges_rejected(edges):
    with pytest.raises(ValueError):
        Graph(3, edges)


def test_disconnected_rejected():
    with pytest.raises(ValueError, match="connected"):
        Graph(4, ((0, 1), (2, 3)))


def test_bad_target_rejected():
    with pytest.raises(ValueError):
        Graph(3, ((0, 1), (1, 2)), target=3)


def test_with_target():
    g = complete_graph(4).with_target(2)
    assert g.target == 2
    assert g.edges == complete_graph(4).edges


def test_edge_list_round_trip(tmp_path):
    g = star_graph(5, "external")
    path = tmp_path / "star.edges"
    write_edge_list(g, path)
    loaded = load_edge_list(path)
    assert loaded == g


def test_edge_list_parses_layout(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("# comment\n3 1\n0 1\n\n1 2\n")
    g = load_edge_list(path)
    assert g.n == 3
    assert g.target == 1
    assert g.edges == ((0, 1), (1, 2))


def test_edge_list_bad_header(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("3\n0 1\n")
    with pytest.raises(ValueError):
        load_edge_list(path)


def test_adjacency_symmetric_zero_diagonal():
    a = adjacency_matrix(complete_graph(5))
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0)
    assert a.sum() == 2 * 10
