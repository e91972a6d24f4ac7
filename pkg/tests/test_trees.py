import numpy as np
import pytest
from scipy.stats import chisquare

from elotope.game import check_tree
from elotope.trees import all_spanning_trees, count_spanning_trees, random_connected_graph, random_spanning_tree


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_enumeration_is_complete_and_valid(m):
    trees = [tuple(t) for t in all_spanning_trees(m)]
    assert len(trees) == count_spanning_trees(m)
    assert len(set(trees)) == len(trees)
    for t in trees:
        check_tree(t, m)


def test_count_by_matrix_tree_theorem():
    for m in range(2, 8):
        lap = m * np.eye(m) - np.ones((m, m))
        assert round(np.linalg.det(lap[1:, 1:])) == count_spanning_trees(m)


def test_wilson_is_uniform_on_k4():
    rng = np.random.default_rng(1)
    index = {tuple(t): k for k, t in enumerate(all_spanning_trees(4))}
    counts = np.zeros(16)
    for _ in range(16_000):
        counts[index[tuple(random_spanning_tree(4, rng))]] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_wilson_respects_weights():
    rng = np.random.default_rng(2)
    w = np.ones((4, 4)) - np.eye(4)
    w[0, 1] = w[1, 0] = 0.0
    for _ in range(200):
        edges = random_spanning_tree(4, rng, w)
        check_tree(edges, 4)
        assert (0, 1) not in edges


def test_random_connected_graph():
    rng = np.random.default_rng(3)
    for m in range(2, 9):
        adj = random_connected_graph(m, rng)
        assert np.array_equal(adj, adj.T) and not adj.diagonal().any()
        reach = np.linalg.matrix_power(adj.astype(int) + np.eye(m, dtype=int), m)
        assert (reach > 0).all()
