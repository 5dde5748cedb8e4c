"""Multi-color de Bruijn graph: construction from reads, adjacency, serialization.

Nodes are canonical k-mers (lexicographic min of a k-mer and its reverse
complement), which gives the undirected strand-collapsed view the cycle search
operates on. Each node carries a per-color coverage vector and an 8-bit
adjacency mask: bits 0-3 are forward extensions (next base after the k-mer in
its canonical orientation), bits 4-7 are reverse extensions (base preceding it).
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import dna
from .errors import (
    BadMagicError,
    DigestMismatchError,
    FileFormatError,
    InputError,
    ReadParseError,
    TruncatedFileError,
    VersionMismatchError,
)
from .reads import parse_reads

GRAPH_MAGIC = b"PICYCGPH"
GRAPH_VERSION = 1
COVERAGE_CAP = 2**32 - 1  # counters saturate instead of wrapping

_COMP = {"A": "T", "C": "G", "G": "C", "T": "A"}
_CODE = {"A": 0, "C": 1, "G": 2, "T": 3}

# A neighbor is reported as (canonical k-mer, (side, base)) where side "F"
# means the neighbor extends this node's canonical orientation to the right
# with `base`, and "R" means it precedes it on the left with `base`.
Neighbor = tuple[str, tuple[str, str]]


@dataclass(slots=True)
class GraphNode:
    kmer: str
    coverage: tuple[int, ...]
    edges: int


@dataclass
class ColoredGraph:
    """Immutable (by convention, after build) k-mer hash table."""

    k: int
    colors: tuple[str, ...]
    nodes: dict[str, GraphNode]
    fingerprint: int
    _adj: dict[str, tuple[Neighbor, ...]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, kmer: str) -> bool:
        return kmer in self.nodes

    def node(self, kmer: str) -> GraphNode:
        return self.nodes[kmer]

    def kmers(self) -> Iterator[str]:
        """Node k-mers in sorted order (the build freezes the table sorted)."""
        return iter(self.nodes)

    def neighbors(self, kmer: str) -> tuple[Neighbor, ...]:
        """Distinct adjacent canonical k-mers with orientation tags, sorted.

        Self-loops (a k-mer adjacent to itself, e.g. homopolymer runs) are not
        reported: they cannot take part in simple cycles and would otherwise
        inflate the degree of path-interior vertices.
        """
        cached = self._adj.get(kmer)
        if cached is not None:
            return cached
        node = self.nodes[kmer]
        found: dict[str, tuple[str, str]] = {}
        edges = node.edges
        for i, base in enumerate(dna.BASES):
            if edges & (1 << i):
                nbr = dna.canonicalize(kmer[1:] + base)
                if nbr != kmer:
                    tag = ("F", base)
                    if nbr not in found or tag < found[nbr]:
                        found[nbr] = tag
            if edges & (1 << (4 + i)):
                nbr = dna.canonicalize(base + kmer[:-1])
                if nbr != kmer:
                    tag = ("R", base)
                    if nbr not in found or tag < found[nbr]:
                        found[nbr] = tag
        result = tuple(sorted(found.items()))
        self._adj[kmer] = result
        return result

    def degree(self, kmer: str) -> int:
        return len(self.neighbors(kmer))

    def color_mass(self, color: int) -> int:
        """Total stored coverage of one color (== k-mer windows ingested,
        absent saturation)."""
        return sum(node.coverage[color] for node in self.nodes.values())


class _Builder:
    """Mutable node table used only while ingesting reads."""

    __slots__ = ("k", "n_colors", "table")

    def __init__(self, k: int, n_colors: int):
        self.k = k
        self.n_colors = n_colors
        self.table: dict[str, list] = {}  # kmer -> [coverage list, edge bits]

    def _entry(self, kmer: str) -> list:
        entry = self.table.get(kmer)
        if entry is None:
            entry = [[0] * self.n_colors, 0]
            self.table[kmer] = entry
        return entry

    def add_segment(self, segment: str, color: int) -> int:
        """Ingest one clean A/C/G/T segment; returns windows emitted."""
        k = self.k
        n = len(segment) - k + 1
        if n <= 0:
            return 0
        prev_win = ""
        prev_canon = ""
        for i in range(n):
            win = segment[i : i + k]
            canon = dna.canonicalize(win)
            entry = self._entry(canon)
            cov = entry[0][color]
            if cov < COVERAGE_CAP:
                entry[0][color] = cov + 1
            if i:
                # consecutive windows overlap by k-1: record the mutual edge
                b = win[-1]
                if prev_win == prev_canon:
                    self.table[prev_canon][1] |= 1 << _CODE[b]
                else:
                    self.table[prev_canon][1] |= 1 << (4 + _CODE[_COMP[b]])
                a = prev_win[0]
                if win == canon:
                    entry[1] |= 1 << (4 + _CODE[a])
                else:
                    entry[1] |= 1 << _CODE[_COMP[a]]
            prev_win = win
            prev_canon = canon
        return n

    def freeze(self, colors: Sequence[str]) -> ColoredGraph:
        nodes: dict[str, GraphNode] = {}
        for kmer in sorted(self.table):
            cov, edges = self.table[kmer]
            nodes[kmer] = GraphNode(kmer, tuple(cov), edges)
        fp = compute_fingerprint(self.k, colors, nodes.values())
        return ColoredGraph(self.k, tuple(colors), nodes, fp)


def compute_fingerprint(k: int, colors: Sequence[str], nodes: Iterable[GraphNode]) -> int:
    """64-bit content digest over k, color names, and sorted node records."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<II", k, len(colors)))
    for name in colors:
        raw = name.encode("utf-8")
        h.update(struct.pack("<I", len(raw)))
        h.update(raw)
    for node in nodes:
        h.update(dna.pack_kmer(node.kmer))
        h.update(struct.pack(f"<{len(node.coverage)}I", *node.coverage))
        h.update(bytes((node.edges,)))
    return int.from_bytes(h.digest(), "little")


def build_graph(
    manifest: Sequence[tuple[str, Sequence[str | Path]]], k: int
) -> ColoredGraph:
    """Build the colored graph from per-sample read files.

    Every k-mer window increments its color's coverage on the canonical node;
    every consecutive window pair sets the mutual edge bits. Colors are
    ingested in manifest order, so the result is deterministic; the frozen
    graph iterates nodes in sorted canonical order.
    """
    dna.check_k(k)
    if not manifest:
        raise InputError("manifest defines no colors")
    builder = _Builder(k, len(manifest))
    for color, (name, paths) in enumerate(manifest):
        if not paths:
            raise InputError(f"color {name!r} lists no read files")
        for path in paths:
            try:
                for _read_id, bases in parse_reads(path):
                    for segment in dna.clean_segments(bases):
                        builder.add_segment(segment, color)
            except (ReadParseError, OSError) as exc:
                raise InputError(f"color {name!r}, file {path}: {exc}") from exc
    return builder.freeze([name for name, _ in manifest])


def load_manifest(path: str | Path) -> list[tuple[str, list[Path]]]:
    """Parse a color manifest: `<sample-name><TAB><comma-separated read paths>`.

    Relative read paths are resolved against the manifest's directory.
    """
    path = Path(path)
    base = path.parent
    manifest: list[tuple[str, list[Path]]] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise InputError(f"{path}:{lineno}: expected <name><TAB><paths>")
        name, paths_field = line.split("\t", 1)
        paths = [p.strip() for p in paths_field.split(",") if p.strip()]
        if not name.strip() or not paths:
            raise InputError(f"{path}:{lineno}: empty sample name or path list")
        resolved = [base / p if not Path(p).is_absolute() else Path(p) for p in paths]
        manifest.append((name.strip(), resolved))
    if not manifest:
        raise InputError(f"manifest {path} defines no colors")
    return manifest


def save_graph(graph: ColoredGraph, path: str | Path) -> None:
    """Write the binary graph file (see README for the exact layout)."""
    k = graph.k
    n_colors = len(graph.colors)
    with open(path, "wb") as out:
        out.write(GRAPH_MAGIC)
        out.write(struct.pack("<III", GRAPH_VERSION, k, n_colors))
        for name in graph.colors:
            raw = name.encode("utf-8")
            out.write(struct.pack("<I", len(raw)))
            out.write(raw)
        out.write(struct.pack("<QQ", len(graph.nodes), graph.fingerprint))
        cov_fmt = f"<{n_colors}I"
        for kmer, node in graph.nodes.items():
            out.write(dna.pack_kmer(kmer))
            out.write(struct.pack(cov_fmt, *node.coverage))
            out.write(bytes((node.edges,)))


def _read_exact(handle, n: int, what: str) -> bytes:
    data = handle.read(n)
    if len(data) != n:
        raise TruncatedFileError(f"file ended while reading {what}")
    return data


def load_graph(path: str | Path) -> ColoredGraph:
    """Read a graph file back; verifies magic, version, structure, and digest."""
    with open(path, "rb") as handle:
        magic = handle.read(len(GRAPH_MAGIC))
        if magic != GRAPH_MAGIC:
            raise BadMagicError(f"{path}: not a graph file (bad magic)")
        version, k, n_colors = struct.unpack(
            "<III", _read_exact(handle, 12, "header")
        )
        if version != GRAPH_VERSION:
            raise VersionMismatchError(f"{path}: unsupported graph version {version}")
        try:
            dna.check_k(k)
        except ValueError as exc:
            raise FileFormatError(f"{path}: {exc}") from exc
        if n_colors < 1:
            raise FileFormatError(f"{path}: color count must be >= 1")
        colors = []
        for _ in range(n_colors):
            (name_len,) = struct.unpack("<I", _read_exact(handle, 4, "color name"))
            colors.append(_read_exact(handle, name_len, "color name").decode("utf-8"))
        n_nodes, fingerprint = struct.unpack("<QQ", _read_exact(handle, 16, "node count"))
        kmer_bytes = dna.packed_size(k)
        cov_fmt = f"<{n_colors}I"
        record = kmer_bytes + 4 * n_colors + 1
        nodes: dict[str, GraphNode] = {}
        prev = ""
        for i in range(n_nodes):
            raw = _read_exact(handle, record, f"node {i}")
            kmer = dna.unpack_kmer(raw[:kmer_bytes], k)
            if kmer <= prev and i:
                raise FileFormatError(f"{path}: nodes out of order at record {i}")
            prev = kmer
            coverage = struct.unpack(cov_fmt, raw[kmer_bytes:-1])
            nodes[kmer] = GraphNode(kmer, coverage, raw[-1])
        if handle.read(1):
            raise FileFormatError(f"{path}: trailing data after last node")
    actual = compute_fingerprint(k, colors, nodes.values())
    if actual != fingerprint:
        raise DigestMismatchError(
            f"{path}: content digest mismatch (stored {fingerprint:#x}, actual {actual:#x})"
        )
    return ColoredGraph(k, tuple(colors), nodes, fingerprint)
