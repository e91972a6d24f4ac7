"""Spanning trees of the complete graph K_m: exhaustive enumeration and uniform sampling."""

from __future__ import annotations

import heapq
import itertools
from collections.abc import Iterator

import numpy as np

Edge = tuple[int, int]


def count_spanning_trees(m: int) -> int:
    """Cayley's formula ``m ** (m - 2)``."""
    return 1 if m <= 2 else m ** (m - 2)


def prufer_to_edges(seq: tuple[int, ...], m: int) -> list[Edge]:
    degree = [1] * m
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(m) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return sorted(edges)


def all_spanning_trees(m: int) -> Iterator[list[Edge]]:
    """Every spanning tree of K_m, in Pruefer-sequence order."""
    if m < 2:
        yield []
        return
    for seq in itertools.product(range(m), repeat=m - 2):
        yield prufer_to_edges(seq, m)


def random_spanning_tree(m: int, rng: np.random.Generator,
                         weights: np.ndarray | None = None) -> list[Edge]:
    """Wilson's loop-erased random walk; uniform over spanning trees when ``weights`` is None.

    With a symmetric ``weights`` matrix the tree is drawn with probability
    proportional to the product of its edge weights.
    """
    if m < 2:
        return []
    if weights is None:
        weights = 1.0 - np.eye(m)
    cdf = np.cumsum(weights, axis=1)
    cdf /= cdf[:, -1:]
    in_tree = np.zeros(m, dtype=bool)
    in_tree[rng.integers(m)] = True
    nxt = np.full(m, -1)
    for start in rng.permutation(m):
        u = int(start)
        # walk until hitting the tree, remembering only the last exit from each vertex
        while not in_tree[u]:
            nxt[u] = min(int(np.searchsorted(cdf[u], rng.random(), side="right")), m - 1)
            u = nxt[u]
        u = int(start)
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    # the root has no successor; every other vertex contributes its final exit edge
    return sorted((min(v, int(nxt[v])), max(v, int(nxt[v]))) for v in range(m) if nxt[v] >= 0)


def random_connected_graph(m: int, rng: np.random.Generator, extra_edge_prob: float = 0.5) -> np.ndarray:
    """Boolean adjacency of a connected graph: a uniform spanning tree plus random extra edges."""
    adj = np.zeros((m, m), dtype=bool)
    for i, j in random_spanning_tree(m, rng):
        adj[i, j] = adj[j, i] = True
    extra = np.triu(rng.random((m, m)) < extra_edge_prob, k=1)
    adj |= extra | extra.T
    return adj
