"""Shared test helpers: hand-built subgraphs and random sparse graphs."""
from __future__ import annotations

import random
from collections import defaultdict

import pytest

from picyc.neighborhood import Subgraph


def make_subgraph(edges, seed=None) -> Subgraph:
    """Build a Subgraph directly from an undirected edge list."""
    adj: dict[str, set[str]] = defaultdict(set)
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    vertices = sorted(adj)
    if seed is None:
        seed = vertices[0]
    order = [seed]
    seen = {seed}
    i = 0
    while i < len(order):
        for nb in sorted(adj[order[i]]):
            if nb not in seen:
                order.append(nb)
                seen.add(nb)
        i += 1
    assert len(order) == len(vertices), "edge list must be connected"
    return Subgraph(seed, tuple(order), {v: tuple(sorted(adj[v])) for v in order})


def ring_edges(labels):
    return [(labels[i], labels[(i + 1) % len(labels)]) for i in range(len(labels))]


def random_sparse_subgraph(rng: random.Random, n_max: int = 60) -> Subgraph:
    """Random connected graph: tree, usually an attached even ring, few chords.

    The cyclomatic number stays small (<= ~6) so the exhaustive oracle remains
    fast, while bubble-length rings with antipodal spokes appear often enough
    to exercise the positive cases.
    """
    n_tree = rng.randint(6, max(6, n_max - 20))
    verts = [f"v{i:02d}" for i in range(n_tree)]
    edges = set()

    def add(u, v):
        if u != v:
            edges.add((min(u, v), max(u, v)))

    for i in range(1, n_tree):
        add(verts[rng.randrange(i)], verts[i])
    if rng.random() < 0.75:
        ring_len = rng.choice([12, 14, 16, 18])
        ring = [f"r{i:02d}" for i in range(ring_len)]
        for u, v in ring_edges(ring):
            add(u, v)
        if rng.random() < 0.6:
            spoke_at = [0, ring_len // 2]  # antipodal pair of branch vertices
        else:
            spoke_at = rng.sample(range(ring_len), rng.randint(1, 3))
        for pos in spoke_at:
            add(ring[pos], rng.choice(verts))
    for _ in range(rng.randint(0, 2)):
        add(rng.choice(verts), rng.choice(verts))
    return make_subgraph(sorted(edges))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL/SKIP line per acceptance criterion."""
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in item.nodeid:
        return
    label = item.name
    if report.passed:
        status = "PASS"
    elif report.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    print(f"\n[ACCEPTANCE] {label}: {status}")
