"""Cycle-to-bubble decomposition, path coverage extraction, SNP prediction.

A qualifying cycle splits at its antipodal branching pair into two equal-length
paths. Walking each path and appending one base per overlap step rebuilds the
two nucleotide labels; positions where they disagree (strictly inside the
shared k-base flanks) are candidate SNPs, and the per-color path coverages
decide which candidates look like real sample differences.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from statistics import median
from typing import Iterable, Sequence

from .cycles import Cycle
from .dna import revcomp
from .errors import OrientationError, PairMismatchError
from .graph import ColoredGraph

CLASS_A = "A-allele"
CLASS_B = "B-allele"
CLASS_BOTH = "both"
CLASS_ABSENT = "absent"

FASTA_WIDTH = 60


@dataclass(frozen=True)
class Bubble:
    """Two equal-length paths between the same pair of branching vertices."""

    id: str
    k: int
    n: int
    path_a: tuple[str, ...]
    path_b: tuple[str, ...]
    label_a: str
    label_b: str

    @property
    def endpoints(self) -> tuple[str, str]:
        return self.path_a[0], self.path_a[-1]


@dataclass(frozen=True)
class PathCoverage:
    """Per-color coverage of every path vertex, with interior summaries.

    Matrices are color-major: matrix_a[c][i] is color c's coverage of the
    i-th vertex of path A. Interior summaries exclude the shared endpoints.
    """

    matrix_a: tuple[tuple[int, ...], ...]
    matrix_b: tuple[tuple[int, ...], ...]
    min_a: tuple[int, ...]
    min_b: tuple[int, ...]
    median_a: tuple[float, ...]
    median_b: tuple[float, ...]


@dataclass(frozen=True)
class SnpCall:
    bubble_id: str
    offset: int
    allele_a: str
    allele_b: str
    classifications: tuple[str, ...]  # one per color
    predicted: bool


def bubble_id(cycle: Cycle) -> str:
    """Stable 64-bit hex id derived from the canonical vertex sequence."""
    h = hashlib.blake2b(",".join(cycle.vertices).encode("ascii"), digest_size=8)
    return h.hexdigest()


def _walk_label(path: Sequence[str], start_oriented: str) -> str | None:
    """Spell the path starting from one orientation of its first vertex.

    Each step admits at most one orientation of the next vertex (odd k rules
    out the ambiguous case), so the walk either spells a unique string or
    fails for this choice of start orientation.
    """
    chars = list(start_oriented)
    current = start_oriented
    for vertex in path[1:]:
        rc = revcomp(vertex)
        if vertex[:-1] == current[1:]:
            nxt = vertex
        elif rc[:-1] == current[1:]:
            nxt = rc
        else:
            return None
        chars.append(nxt[-1])
        current = nxt
    return "".join(chars)


def decompose(cycle: Cycle, graph: ColoredGraph, k: int) -> Bubble:
    """Split a cycle at its branching pair and reconstruct both path labels.

    Labels must agree on their first and last k bases (the shared flank
    k-mers); failure to orient both paths consistently is a corruption-level
    error, not a callable variant.
    """
    length = len(cycle.vertices)
    if length % 2 or length < 2 * k + 2:
        raise ValueError(f"cycle length {length} cannot be a 2(k+n)+2 bubble for k={k}")
    n = cycle.stretch(k)
    p, q = cycle.branch_positions
    if (q - p) % length != length // 2:
        raise ValueError(f"branch positions {cycle.branch_positions} are not antipodal")
    half = length // 2
    path_a = tuple(cycle.vertices[(p + i) % length] for i in range(half + 1))
    path_b = tuple(cycle.vertices[(p - i) % length] for i in range(half + 1))
    for vertex in cycle.vertices:
        if vertex not in graph:
            raise PairMismatchError(f"cycle vertex {vertex} missing from graph")

    start = path_a[0]
    candidates_a = [lab for o in (start, revcomp(start)) if (lab := _walk_label(path_a, o))]
    for label_a in candidates_a:
        label_b = _walk_label(path_b, label_a[:k])
        if label_b is not None and label_a[-k:] == label_b[-k:]:
            ident = bubble_id(cycle)
            return Bubble(ident, k, n, path_a, path_b, label_a, label_b)
    raise OrientationError(
        f"cannot orient cycle {cycle.vertices[0]}..: paths do not share flank k-mers"
    )


def mismatches(bubble: Bubble) -> int:
    """Hamming distance between the two labels."""
    if len(bubble.label_a) != len(bubble.label_b):
        raise ValueError("labels differ in length")
    return sum(a != b for a, b in zip(bubble.label_a, bubble.label_b))


def mismatch_offsets(bubble: Bubble) -> list[int]:
    return [i for i, (a, b) in enumerate(zip(bubble.label_a, bubble.label_b)) if a != b]


def filter_bubbles(bubbles: Iterable[Bubble], f: int) -> list[Bubble]:
    """Keep bubbles with 1..f mismatching positions.

    Zero-mismatch cycles are pure repeat artifacts and carry no SNP signal;
    f caps how diverged a path pair may be before it is dropped as noise.
    """
    if f < 0:
        raise ValueError(f"mismatch cap must be >= 0, got {f}")
    return [b for b in bubbles if 1 <= mismatches(b) <= f]


def extract_coverage(bubble: Bubble, graph: ColoredGraph) -> PathCoverage:
    """Read per-color coverages of every path vertex from the graph table."""
    n_colors = len(graph.colors)

    def matrix(path: tuple[str, ...]) -> tuple[tuple[int, ...], ...]:
        rows = []
        for color in range(n_colors):
            row = []
            for vertex in path:
                if vertex not in graph:
                    raise PairMismatchError(f"path vertex {vertex} missing from graph")
                row.append(graph.node(vertex).coverage[color])
            rows.append(tuple(row))
        return tuple(rows)

    mat_a = matrix(bubble.path_a)
    mat_b = matrix(bubble.path_b)
    interior = slice(1, -1)
    return PathCoverage(
        matrix_a=mat_a,
        matrix_b=mat_b,
        min_a=tuple(min(row[interior]) for row in mat_a),
        min_b=tuple(min(row[interior]) for row in mat_b),
        median_a=tuple(float(median(row[interior])) for row in mat_a),
        median_b=tuple(float(median(row[interior])) for row in mat_b),
    )


def predict_snps(bubble: Bubble, coverage: PathCoverage, c_min: int = 1) -> list[SnpCall]:
    """One call per mismatch offset, flagged by the coverage support pattern.

    A color supports a path when its minimum interior coverage reaches c_min.
    A position is predicted as a SNP when both paths have support and the
    supporting color sets differ; identical support on both sides looks like
    a repeat or shared heterozygosity, an unsupported path like sequencing
    error, and neither is called.
    """
    if c_min < 1:
        raise ValueError(f"c_min must be >= 1, got {c_min}")
    n_colors = len(coverage.min_a)
    support_a = frozenset(c for c in range(n_colors) if coverage.min_a[c] >= c_min)
    support_b = frozenset(c for c in range(n_colors) if coverage.min_b[c] >= c_min)
    predicted = bool(support_a) and bool(support_b) and support_a != support_b

    def classify(color: int) -> str:
        in_a = color in support_a
        in_b = color in support_b
        if in_a and in_b:
            return CLASS_BOTH
        if in_a:
            return CLASS_A
        if in_b:
            return CLASS_B
        return CLASS_ABSENT

    classifications = tuple(classify(c) for c in range(n_colors))
    return [
        SnpCall(
            bubble_id=bubble.id,
            offset=offset,
            allele_a=bubble.label_a[offset],
            allele_b=bubble.label_b[offset],
            classifications=classifications,
            predicted=predicted,
        )
        for offset in mismatch_offsets(bubble)
    ]


def write_fasta(bubbles: Iterable[Bubble], path: str | Path) -> None:
    """Two records per bubble (`<id>_A`, `<id>_B`), sorted by id, 60-col wrapped."""
    with open(path, "w", encoding="ascii") as out:
        for bubble in sorted(bubbles, key=lambda b: b.id):
            for suffix, label in (("A", bubble.label_a), ("B", bubble.label_b)):
                out.write(f">{bubble.id}_{suffix}\n")
                for i in range(0, len(label), FASTA_WIDTH):
                    out.write(label[i : i + FASTA_WIDTH] + "\n")


def write_variants(calls: Iterable[SnpCall], colors: Sequence[str], path: str | Path) -> None:
    """TSV of calls: position, alleles, prediction flag, one column per color."""
    with open(path, "w", encoding="utf-8") as out:
        out.write("\t".join(["bubble_id", "offset", "allele_a", "allele_b", "predicted", *colors]))
        out.write("\n")
        for call in sorted(calls, key=lambda c: (c.bubble_id, c.offset)):
            row = [
                call.bubble_id,
                str(call.offset),
                call.allele_a,
                call.allele_b,
                "true" if call.predicted else "false",
                *call.classifications,
            ]
            out.write("\t".join(row) + "\n")
