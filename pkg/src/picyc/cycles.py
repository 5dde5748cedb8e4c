"""Fixed-size cycle enumeration inside neighborhood subgraphs.

A single isolated nucleotide disagreement between two samples shows up in the
strand-collapsed graph as an undirected cycle of length 2k+2; n further
disagreements inside one window stretch it to 2(k+n)+2. The search walks the
subgraph with a depth-bounded backtracking traversal and keeps the simple
cycles whose length is in the allowed set and which carry two branching
vertices exactly half the cycle apart (equal-length bubble paths).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import dna
from .neighborhood import Subgraph, branching_vertices


@dataclass(frozen=True)
class SearchParams:
    """Knobs for neighborhood construction and cycle enumeration."""

    k: int
    n_min: int = 0
    n_max: int | None = None  # defaults to k, the widest useful stretch
    v_max: int = 5000
    fraction: Fraction = Fraction(1)
    fraction_mode: str = "strided"
    workers: int = 1
    budget_seconds: float | None = None
    chunk_size: int = 64

    def __post_init__(self):
        dna.check_k(self.k)
        if self.n_max is None:
            object.__setattr__(self, "n_max", self.k)
        if not 0 <= self.n_min <= self.n_max <= self.k:
            raise ValueError(
                f"need 0 <= n_min <= n_max <= k, got n_min={self.n_min} "
                f"n_max={self.n_max} k={self.k}"
            )
        if self.v_max < self.min_subgraph_size:
            raise ValueError(
                f"v_max must be >= 2k+2 = {self.min_subgraph_size}, got {self.v_max}"
            )
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise ValueError("budget_seconds must be positive when given")

    @property
    def min_subgraph_size(self) -> int:
        """Smallest subgraph that can hold any target cycle (2k+2)."""
        return 2 * self.k + 2

    @property
    def max_length(self) -> int:
        return 2 * (self.k + self.n_max) + 2

    def allowed_lengths(self) -> frozenset[int]:
        return frozenset(2 * (self.k + n) + 2 for n in range(self.n_min, self.n_max + 1))


@dataclass(frozen=True)
class Cycle:
    """A qualifying cycle, stored in its canonical rotation.

    `branch_positions` is the lowest-index antipodal pair of branching
    vertices (positions exactly len/2 apart along the cycle).
    """

    vertices: tuple[str, ...]
    branch_positions: tuple[int, int]

    def __len__(self) -> int:
        return len(self.vertices)

    def stretch(self, k: int) -> int:
        """The n in len == 2(k+n)+2."""
        return (len(self.vertices) - 2) // 2 - k


def canonicalize_cycle(vertices: Sequence[str]) -> tuple[str, ...]:
    """Rotation/reflection-invariant form: minimal rotation of either direction.

    All 2L traversal representations of one undirected cycle map to the same
    tuple, which makes it the deduplication key across subgraphs and workers.
    """
    seq = tuple(vertices)
    if not seq:
        raise ValueError("cannot canonicalize an empty cycle")
    best = seq
    for direction in (seq, seq[::-1]):
        for r in range(len(direction)):
            rotated = direction[r:] + direction[:r]
            if rotated < best:
                best = rotated
    return best


def _antipodal_branch_pair(
    vertices: tuple[str, ...], branching: frozenset[str] | set[str]
) -> tuple[int, int] | None:
    """Lowest-index pair (i, i + L/2) with both vertices branching, if any."""
    length = len(vertices)
    if length % 2:
        return None
    half = length // 2
    for i in range(half):
        if vertices[i] in branching and vertices[i + half] in branching:
            return (i, i + half)
    return None


def search_cycles(
    subgraph: Subgraph,
    start: str,
    params: SearchParams,
    *,
    only_min_branching: bool = False,
) -> dict[tuple[str, ...], Cycle]:
    """Every qualifying simple cycle through `start`, keyed by canonical form.

    Qualifying means: length in {2(k+n)+2 for n_min <= n <= n_max} and at
    least one antipodal pair of subgraph-branching vertices. The traversal is
    depth-bounded backtracking over the undirected adjacency, pruned by BFS
    distance back to the start.

    `only_min_branching` restricts output to cycles whose smallest branching
    vertex is `start`. The shard driver enables it so that each cycle is
    enumerated from exactly one of its branching vertices instead of all of
    them; the union over starts is unchanged.
    """
    branching = set(branching_vertices(subgraph))
    if start not in branching:
        raise ValueError(f"start {start!r} is not a branching vertex of the subgraph")
    adj = subgraph.adjacency
    allowed = params.allowed_lengths()
    max_len = params.max_length

    # single-source BFS distances for the "can still get home" prune
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            d = dist[v] + 1
            for nb in adj[v]:
                if nb not in dist:
                    dist[nb] = d
                    nxt.append(nb)
        frontier = nxt

    found: dict[tuple[str, ...], Cycle] = {}
    path = [start]
    on_path = {start}
    stack = [iter(adj[start])]
    while stack:
        descended = False
        for nb in stack[-1]:
            if nb == start:
                length = len(path)
                if length >= 3 and length in allowed:
                    if _antipodal_branch_pair(tuple(path), branching) is not None and (
                        not only_min_branching
                        or min(v for v in path if v in branching) == start
                    ):
                        canon = canonicalize_cycle(path)
                        if canon not in found:
                            # the antipodal property is rotation/reflection
                            # invariant, so it holds on the canonical form too
                            pair = _antipodal_branch_pair(canon, branching)
                            assert pair is not None
                            found[canon] = Cycle(canon, pair)
                continue
            if nb in on_path:
                continue
            # after appending nb, the shortest way home closes a cycle of
            # len(path) + dist[nb] vertices; prune when even that is too long
            if len(path) + dist[nb] > max_len:
                continue
            if only_min_branching and nb in branching and nb < start:
                continue
            path.append(nb)
            on_path.add(nb)
            stack.append(iter(adj[nb]))
            descended = True
            break
        if not descended:
            stack.pop()
            on_path.discard(path.pop())
    return found
