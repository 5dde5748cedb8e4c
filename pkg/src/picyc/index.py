"""Branching-vertex index: extraction, sharding, fraction selection, work chunks.

The index is the unit of distribution: shards map to independent processes
(simulated compute nodes, via the CLI's --shard i/N), and within one process
fixed-size chunks of a shard feed a dynamic worker queue.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from pathlib import Path

from . import dna
from .errors import (
    BadMagicError,
    FileFormatError,
    PairMismatchError,
    VersionMismatchError,
)
from .graph import ColoredGraph, _read_exact

INDEX_MAGIC = b"PICYCIDX"
INDEX_VERSION = 1
DEFAULT_CHUNK = 64


@dataclass(frozen=True)
class BranchingIndex:
    """Sorted branching vertices (undirected degree >= 3) of one graph."""

    k: int
    entries: tuple[str, ...]
    fingerprint: int

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class IndexShard:
    """Contiguous slice of a BranchingIndex assigned to one process."""

    shard_id: int
    shard_count: int
    k: int
    entries: tuple[str, ...]
    fingerprint: int

    def __len__(self) -> int:
        return len(self.entries)


def build_index(graph: ColoredGraph) -> BranchingIndex:
    """Collect every vertex with undirected degree >= 3, in sorted order.

    Degree 3 is the minimal condition for a vertex to anchor two diverging
    bubble paths plus an entry edge.
    """
    entries = tuple(kmer for kmer in graph.kmers() if graph.degree(kmer) >= 3)
    return BranchingIndex(graph.k, entries, graph.fingerprint)


def shard_index(index: BranchingIndex, shard_id: int, shard_count: int) -> IndexShard:
    """Contiguous partition; the first (len mod N) shards carry one extra entry."""
    if shard_count < 1:
        raise ValueError(f"shard count must be >= 1, got {shard_count}")
    if not 0 <= shard_id < shard_count:
        raise ValueError(f"shard id {shard_id} out of range for {shard_count} shards")
    n = len(index.entries)
    base, extra = divmod(n, shard_count)
    start = shard_id * base + min(shard_id, extra)
    size = base + (1 if shard_id < extra else 0)
    return IndexShard(
        shard_id, shard_count, index.k, index.entries[start : start + size], index.fingerprint
    )


def select_fraction(
    shard: IndexShard, fraction: Fraction | float, mode: str = "strided"
) -> IndexShard:
    """Thin a shard to roughly `fraction` of its entries.

    Strided mode (default) keeps every floor(1/fraction)-th entry, which
    samples the k-mer space evenly; prefix mode keeps the first
    ceil(fraction*n) entries and is biased toward low-sorting k-mers.
    """
    frac = Fraction(fraction).limit_denominator(10**9)
    if not 0 < frac <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if mode == "prefix":
        keep = shard.entries[: ceil(frac * len(shard.entries))]
    elif mode == "strided":
        stride = int(1 / frac)
        keep = shard.entries[::stride]
    else:
        raise ValueError(f"unknown selection mode {mode!r}")
    return IndexShard(shard.shard_id, shard.shard_count, shard.k, keep, shard.fingerprint)


def partition_for_workers(
    shard: IndexShard, workers: int = 1, chunk_size: int = DEFAULT_CHUNK
) -> list[range]:
    """Fixed-size chunk ranges over a shard's entries.

    Chunks are consumed dynamically by idle workers, so the chunk set itself
    does not depend on the worker count; every entry lands in exactly one chunk.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if chunk_size < 1:
        raise ValueError(f"chunk size must be >= 1, got {chunk_size}")
    n = len(shard.entries)
    return [range(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def save_index(index: BranchingIndex, path: str | Path) -> None:
    with open(path, "wb") as out:
        out.write(INDEX_MAGIC)
        out.write(struct.pack("<IQQ", INDEX_VERSION, index.fingerprint, len(index.entries)))
        for kmer in index.entries:
            out.write(dna.pack_kmer(kmer))


def load_index(path: str | Path, graph: ColoredGraph) -> BranchingIndex:
    """Read an index file; refuses to pair it with a graph it was not built from.

    The file stores no k of its own: entry width comes from the graph, and the
    fingerprint check rejects any graph/index mix-up before entries are used.
    """
    with open(path, "rb") as handle:
        magic = handle.read(len(INDEX_MAGIC))
        if magic != INDEX_MAGIC:
            raise BadMagicError(f"{path}: not an index file (bad magic)")
        version, fingerprint, count = struct.unpack(
            "<IQQ", _read_exact(handle, 20, "header")
        )
        if version != INDEX_VERSION:
            raise VersionMismatchError(f"{path}: unsupported index version {version}")
        if fingerprint != graph.fingerprint:
            raise PairMismatchError(
                f"{path}: index/graph pair mismatch "
                f"(index {fingerprint:#x}, graph {graph.fingerprint:#x})"
            )
        width = dna.packed_size(graph.k)
        entries = []
        prev = ""
        for i in range(count):
            kmer = dna.unpack_kmer(_read_exact(handle, width, f"entry {i}"), graph.k)
            if i and kmer <= prev:
                raise FileFormatError(f"{path}: entries out of order at record {i}")
            prev = kmer
            entries.append(kmer)
        if handle.read(1):
            raise FileFormatError(f"{path}: trailing data after last entry")
    return BranchingIndex(graph.k, tuple(entries), fingerprint)
