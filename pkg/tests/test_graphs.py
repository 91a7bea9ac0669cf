import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwsearch import (
    GraphSpec,
    InvalidParameterError,
    ParseError,
    complete_graph,
    full_hamiltonian,
    hypercube_graph,
    load_edge_list,
    simplex_complete_graph,
    to_edge_list,
)


def degrees_by_loop(g):
    deg = [0] * g.num_vertices
    for u, v in g.edge_set():
        deg[u] += 1
        deg[v] += 1
    return deg


@pytest.mark.parametrize(
    "N, edges, degree",
    [(6, 15, 5), (1, 0, 0), (4, 6, 3)],
)
def test_complete_graph_counts(N, edges, degree):
    g = complete_graph(N)
    assert g.num_vertices == N
    assert g.num_edges == edges
    assert degrees_by_loop(g) == [degree] * N
    assert g.marked == 0


def test_complete_graph_rejects_zero():
    with pytest.raises(InvalidParameterError):
        complete_graph(0)


@pytest.mark.parametrize("M, N, E", [(5, 30, 75), (3, 12, 18), (2, 6, 6)])
def test_simplex_counts_and_regularity(M, N, E):
    g = simplex_complete_graph(M)
    assert g.num_vertices == N
    assert g.num_edges == E
    assert degrees_by_loop(g) == [M] * N


@pytest.mark.parametrize("M", [2, 3, 4, 5, 7])
def test_simplex_clique_structure(M):
    g = simplex_complete_graph(M)
    clique = lambda v: v // M  # noqa: E731
    intra = [0] * g.num_vertices
    inter = [0] * g.num_vertices
    pair_edges = {}
    for u, v in g.edge_set():
        if clique(u) == clique(v):
            intra[u] += 1
            intra[v] += 1
        else:
            inter[u] += 1
            inter[v] += 1
            key = tuple(sorted((clique(u), clique(v))))
            pair_edges[key] = pair_edges.get(key, 0) + 1
    assert intra == [M - 1] * g.num_vertices
    assert inter == [1] * g.num_vertices
    assert pair_edges == {p: 1 for p in itertools.combinations(range(M + 1), 2)}


def test_simplex_m2_is_six_cycle():
    g = simplex_complete_graph(2)
    cycle = {tuple(sorted((i, (i + 1) % 6))) for i in range(6)}
    edges = g.edge_set()
    # brute-force isomorphism search over vertex relabellings
    found = any(
        {tuple(sorted((perm[u], perm[v]))) for u, v in edges} == cycle
        for perm in itertools.permutations(range(6))
    )
    assert found


def test_simplex_rejects_small_m():
    with pytest.raises(InvalidParameterError):
        simplex_complete_graph(1)


@pytest.mark.parametrize("n, N, E", [(4, 16, 32), (1, 2, 1), (10, 1024, 5120)])
def test_hypercube_counts(n, N, E):
    g = hypercube_graph(n)
    assert g.num_vertices == N
    assert g.num_edges == E
    assert set(degrees_by_loop(g)) == {n}


def test_hypercube_edges_are_hamming_distance_one():
    g = hypercube_graph(5)
    expected = {
        (u, v) for u in range(32) for v in range(u + 1, 32) if bin(u ^ v).count("1") == 1
    }
    assert g.edge_set() == expected


def test_hypercube_rejects_zero():
    with pytest.raises(InvalidParameterError):
        hypercube_graph(0)


def test_graphspec_invariants():
    with pytest.raises(InvalidParameterError):
        GraphSpec(3, [(0, 3)])
    with pytest.raises(InvalidParameterError):
        GraphSpec(3, [(1, 1)])
    with pytest.raises(InvalidParameterError):
        GraphSpec(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidParameterError):
        GraphSpec(3, [(0, 1)], marked=3)


def test_load_path_graph():
    g = load_edge_list("3\n0 1\n1 2\n")
    assert g.num_vertices == 3
    assert g.edge_set() == {(0, 1), (1, 2)}
    assert g.marked == 0
    assert g.family.kind == "custom"


def test_load_with_marked_and_comments():
    g = load_edge_list("# path\n3\nmarked 2  # target\n\n0 1\n1 2 # last\n")
    assert g.marked == 2
    assert g.num_edges == 2


def test_load_k6_round_trip():
    text = "6\n" + "".join(f"{u} {v}\n" for u in range(6) for v in range(u + 1, 6))
    assert load_edge_list(text).edge_set() == complete_graph(6).edge_set()


@pytest.mark.parametrize(
    "text, line",
    [
        ("2\n0 0\n", 2),
        ("3\n0 1\n1 0\n", 3),
        ("3\n0 5\n", 2),
        ("3\n0 x\n", 2),
        ("3\n0 1 2\n", 2),
        ("3\n0 1\nmarked 1\n", 3),
        ("x\n", 1),
    ],
)
def test_load_errors_name_line(text, line):
    with pytest.raises(ParseError) as exc:
        load_edge_list(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


@st.composite
def random_graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    marked = draw(st.integers(0, n - 1))
    return GraphSpec(n, np.array(chosen, dtype=np.int64).reshape(-1, 2), marked)


@given(random_graphs())
@settings(max_examples=60, deadline=None)
def test_serialize_round_trip(g):
    back = load_edge_list(to_edge_list(g))
    assert back.num_vertices == g.num_vertices
    assert back.marked == g.marked
    assert back.edge_set() == g.edge_set()


def test_full_hamiltonian_small_cases():
    h = full_hamiltonian(complete_graph(2), 1.0).entries
    np.testing.assert_array_equal(h, [[-1, -1], [-1, 0]])
    h = full_hamiltonian(hypercube_graph(1), 0.5).entries
    np.testing.assert_array_equal(h, [[-1, -0.5], [-0.5, 0]])


def test_full_hamiltonian_laplacian_on_path():
    g = load_edge_list("3\n0 1\n1 2\n")
    # independent assembly: H = -gamma*(A - D) - |0><0| entry by entry
    gamma = 1.0
    expected = np.zeros((3, 3))
    nbrs = {0: [1], 1: [0, 2], 2: [1]}
    for i in range(3):
        expected[i, i] = gamma * len(nbrs[i])
        for j in nbrs[i]:
            expected[i, j] = -gamma
    expected[0, 0] -= 1
    np.testing.assert_array_equal(full_hamiltonian(g, gamma).entries, expected)
    np.testing.assert_array_equal(expected, [[0, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_full_hamiltonian_forced_adjacency_on_path():
    g = load_edge_list("3\n0 1\n1 2\n")
    h = full_hamiltonian(g, 1.0, form="adjacency").entries
    np.testing.assert_array_equal(h, [[-1, -1, 0], [-1, 0, -1], [0, -1, 0]])


@pytest.mark.parametrize(
    "g", [complete_graph(7), simplex_complete_graph(3), hypercube_graph(4)], ids=str
)
def test_full_hamiltonian_regular_identity(g):
    gamma = 0.37
    h = full_hamiltonian(g, gamma).entries
    assert np.array_equal(h, h.T)
    rest = h + gamma * g.adjacency()
    rest[g.marked, g.marked] += 1.0
    assert np.all(rest == 0)


def test_full_hamiltonian_rejects_nonpositive_gamma():
    with pytest.raises(InvalidParameterError):
        full_hamiltonian(complete_graph(3), 0.0)
