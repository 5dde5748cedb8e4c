"""Bounded undirected neighborhoods grown around branching seed vertices."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import ColoredGraph


@dataclass
class Subgraph:
    """Induced subgraph over a capped breadth-first ball around a seed.

    `vertices` preserves insertion (BFS) order; `adjacency` is restricted to
    the included vertex set and lists neighbors sorted, so every traversal
    over a subgraph is deterministic.
    """

    seed: str
    vertices: tuple[str, ...]
    adjacency: dict[str, tuple[str, ...]]
    _branching: tuple[str, ...] | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.vertices)

    def degree(self, vertex: str) -> int:
        return len(self.adjacency[vertex])

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency.values()) // 2


def graph_neighborhood(graph: ColoredGraph, seed: str, v_max: int) -> Subgraph:
    """Grow a ball of at most v_max vertices around `seed` by BFS.

    Vertices are taken in insertion order and their unseen neighbors appended
    until the cap is hit or the frontier exhausts; the induced edges among the
    collected vertices are then recorded. BFS keeps the ball shaped around the
    seed, so a cap of radius >= k+n+1 still contains every target cycle
    through it.
    """
    if v_max < 1:
        raise ValueError(f"v_max must be >= 1, got {v_max}")
    if seed not in graph:
        raise KeyError(f"seed {seed!r} not in graph")
    order = [seed]
    seen = {seed}
    i = 0
    while i < len(order) and len(order) < v_max:
        vertex = order[i]
        i += 1
        for nbr, _tag in graph.neighbors(vertex):
            if nbr not in seen:
                order.append(nbr)
                seen.add(nbr)
                if len(order) >= v_max:
                    break
    adjacency = {
        v: tuple(nbr for nbr, _tag in graph.neighbors(v) if nbr in seen) for v in order
    }
    return Subgraph(seed, tuple(order), adjacency)


def branching_vertices(subgraph: Subgraph) -> tuple[str, ...]:
    """Vertices of local degree >= 3 within the subgraph, sorted.

    Local status can differ from global branching near the ball boundary,
    where incident edges may fall outside the included vertex set.
    """
    if subgraph._branching is None:
        subgraph._branching = tuple(
            sorted(v for v, nbrs in subgraph.adjacency.items() if len(nbrs) >= 3)
        )
    return subgraph._branching


def complexity(subgraph: Subgraph) -> float:
    """Interconnection measure: undirected edge count over vertex count."""
    if len(subgraph) < 1:
        raise ValueError("complexity needs at least one vertex")
    return subgraph.edge_count / len(subgraph)
