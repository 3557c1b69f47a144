"""Shared test oracles: independent brute-force routes for everything the
fast paths compute."""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
import pytest

from isingspec.graphs import Graph
from isingspec.observables import ObservableSet, state_observables


def naive_signature_counts(g: Graph, obs: ObservableSet = ObservableSet()):
    """Per-state recomputation from scratch; the Gray-walk oracle."""
    counts: dict[tuple[int, ...], int] = {}
    for sigma in range(1 << g.n):
        key = state_observables(g, sigma, obs)
        counts[key] = counts.get(key, 0) + 1
    return counts


def brute_force_isomorphic(g1: Graph, g2: Graph) -> bool:
    """All-permutations oracle, n <= 7."""
    if g1.n != g2.n or g1.edge_count != g2.edge_count:
        return False
    target = set(g2.edges)
    for perm in permutations(range(g1.n)):
        mapped = {tuple(sorted((perm[i], perm[j]))) for i, j in g1.edges}
        if mapped == target:
            return True
    return False


def _is_connected(n: int, edges) -> bool:
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        for u in adj[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == n


def brute_force_tree_count(n: int) -> int:
    """Count tree isomorphism classes by filtering all (n-1)-edge graphs."""
    reps: list[Graph] = []
    for eset in combinations(combinations(range(n), 2), n - 1):
        if not _is_connected(n, eset):
            continue
        g = Graph.from_edges(n, eset)
        if not any(brute_force_isomorphic(g, h) for h in reps):
            reps.append(g)
    return len(reps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
