"""Ground-truth generators and brute-force oracles for desk-scale verification.

Everything here is deterministic under a fixed seed, and the cycle oracle
shares no traversal logic with the production search, so the two can check
each other.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import dna
from .errors import InputError
from .neighborhood import Subgraph
from .variants import Bubble, SnpCall

ORACLE_VERTEX_CAP = 60  # exhaustive enumeration blows up past this


@dataclass(frozen=True)
class Variant:
    position: int
    ref: str
    alt: str
    color: int


@dataclass(frozen=True)
class PlantedTruth:
    """Everything needed to verify calls against what was planted."""

    seed: int
    k: int
    base_genome: str
    variants: tuple[Variant, ...]
    read_length: int
    depth: int
    error_rate: float
    mode: str

    def genome_for(self, color: int) -> str:
        seq = list(self.base_genome)
        for v in self.variants:
            if v.color == color:
                seq[v.position] = v.alt
        return "".join(seq)


@dataclass(frozen=True)
class ScoreResult:
    recall: float
    precision: float
    matched_variants: int
    matched_calls: int
    predicted_calls: int
    planted: int
    zero_denominator: bool


def clean_genome(rng: random.Random, length: int, k: int, max_tries: int = 200) -> str:
    """Random genome whose canonical k-mers are all distinct.

    Distinct k-mers keep the graph a simple path before variants are planted,
    which is what makes planted-bubble counts exact. Built as a random walk
    that refuses to revisit a canonical k-mer, so it works even at small k
    where rejection sampling of whole genomes would almost never succeed.
    """
    for _ in range(max_tries):
        seq = rng.choices(dna.BASES, k=k)
        used = {dna.canonicalize("".join(seq))}
        while len(seq) < length:
            tail = "".join(seq[-(k - 1) :])
            for base in rng.sample(dna.BASES, 4):
                canon = dna.canonicalize(tail + base)
                if canon not in used:
                    seq.append(base)
                    used.add(canon)
                    break
            else:
                break  # dead end; retry from scratch
        if len(seq) == length:
            return "".join(seq)
    raise InputError(f"could not draw a repeat-free genome of length {length} at k={k}")


def _place_positions(
    rng: random.Random, length: int, k: int, count: int, min_gap: int, tail_room: int = 0
) -> list[int]:
    """Sorted positions with pairwise distance >= min_gap, away from the ends.

    Sampling in gap-deflated coordinates and re-inflating makes the draw
    succeed in one shot at any feasible density. `tail_room` reserves extra
    space after the last position (for a clustered partner variant).
    """
    lo, hi = k + 2, length - k - 3 - tail_room
    span = hi - lo + 1 - (count - 1) * min_gap
    if span < count:
        raise InputError(
            f"cannot place {count} variants with gap >= {min_gap} in length {length}"
        )
    offsets = sorted(rng.sample(range(span), count))
    return [lo + off + i * min_gap for i, off in enumerate(offsets)]


def _plant_variants(
    rng: random.Random,
    genome: str,
    k: int,
    n_snps: int,
    colors: int,
    mode: str,
    pair_gap: int | None,
) -> tuple[Variant, ...] | None:
    """Place variants so every mutated window is globally unique, or give up.

    Variants are planted unit by unit (a lone SNP, or a clustered pair sharing
    one color and one stretched bubble); for each unit the alt bases are
    redrawn until none of its windows collides with the base genome or any
    previously planted window. Returns None when a unit exhausts its
    alternatives, which signals the caller to redraw the genome.
    """
    if n_snps == 0:
        return ()
    if colors < 2:
        raise InputError("planting variants needs at least 2 colors")
    if mode == "isolated":
        # gap > 2k keeps every bubble independent of its neighbors
        positions = _place_positions(rng, len(genome), k, n_snps, 2 * k + 2)
        units = [(pos,) for pos in positions]
    elif mode == "clustered":
        if pair_gap is not None and not 1 <= pair_gap <= k - 1:
            raise InputError(f"pair gap must be in [1, {k - 1}], got {pair_gap}")
        n_pairs = (n_snps + 1) // 2
        anchors = _place_positions(rng, len(genome), k, n_pairs, 3 * k + 4, tail_room=k)
        units = []
        remaining = n_snps
        for pos in anchors:
            if remaining >= 2:
                gap = pair_gap if pair_gap is not None else rng.randint(1, k - 1)
                units.append((pos, pos + gap))
                remaining -= 2
            else:
                units.append((pos,))
                remaining -= 1
    else:
        raise InputError(f"unknown mode {mode!r}")

    others = {b: [x for x in dna.BASES if x != b] for b in dna.BASES}
    used = {dna.canonicalize(w) for w in dna.kmerize(genome, k)}
    min_gap = 2 * k + 2 if mode == "isolated" else 3 * k + 4
    spans = [unit[-1] - unit[0] for unit in units]
    anchors = [unit[0] for unit in units]
    pos_lo = k + 2
    pos_hi = len(genome) - k - 3 - max(spans)

    def try_unit(anchor: int, span: int, color: int) -> list[Variant] | None:
        unit = (anchor,) if span == 0 else (anchor, anchor + span)
        lo, hi = unit[0] - k + 1, unit[-1] + k
        combos = [(a,) for a in others[genome[unit[0]]]]
        if len(unit) == 2:
            combos = [(a, b) for (a,) in combos for b in others[genome[unit[1]]]]
        rng.shuffle(combos)
        for combo in combos:
            segment = list(genome[lo:hi])
            for pos, alt in zip(unit, combo):
                segment[pos - lo] = alt
            canons = [dna.canonicalize(w) for w in dna.kmerize("".join(segment), k)]
            if len(set(canons)) == len(canons) and not used.intersection(canons):
                used.update(canons)
                return [Variant(pos, genome[pos], alt, color) for pos, alt in zip(unit, combo)]
        return None

    variants: list[Variant] = []
    for i, span in enumerate(spans):
        color = 1 + i % (colors - 1)
        planted = try_unit(anchors[i], span, color)
        for _redraw in range(30):
            if planted is not None:
                break
            # relocate just this unit; keep distance to every other anchor
            candidate = rng.randint(pos_lo, pos_hi)
            if all(abs(candidate - a) >= min_gap for j, a in enumerate(anchors) if j != i):
                anchors[i] = candidate
                planted = try_unit(candidate, span, color)
        if planted is None:
            return None
        variants.extend(planted)
    return tuple(sorted(variants, key=lambda v: v.position))


def _simulate_reads(
    genome: str,
    read_length: int,
    depth: int,
    rng: random.Random,
    error_rate: float,
    max_step: int | None = None,
) -> list[str]:
    """Uniform tiling at fixed depth; no fragment-length model.

    `max_step` caps the tiling stride (read_length - k + 1 guarantees every
    k-window is covered even at depth 1).
    """
    if len(genome) <= read_length:
        starts = [0]
        read_length = len(genome)
    else:
        step = max(1, min(read_length // depth, max_step or read_length - 1))
        starts = list(range(0, len(genome) - read_length + 1, step))
        if starts[-1] != len(genome) - read_length:
            starts.append(len(genome) - read_length)
    reads = [genome[s : s + read_length] for s in starts]
    if error_rate > 0:
        noisy = []
        for read in reads:
            chars = list(read)
            for i in range(len(chars)):
                if rng.random() < error_rate:
                    chars[i] = rng.choice([b for b in dna.BASES if b != chars[i]])
            noisy.append("".join(chars))
        reads = noisy
    return reads


def synth_genomes(
    seed: int,
    length: int,
    colors: int,
    n_snps: int,
    mode: str = "isolated",
    *,
    k: int,
    out_dir: str | Path,
    read_length: int = 100,
    depth: int = 30,
    error_rate: float = 0.0,
    pair_gap: int | None = None,
) -> tuple[list[tuple[str, list[Path]]], PlantedTruth]:
    """Write per-color read files with planted variants; returns (manifest, truth).

    Color 0 always carries the unmodified base genome; variants are assigned
    round-robin to the remaining colors (clustered pairs land in one color so
    each pair forms a single stretched bubble). Also writes `manifest.tsv` and
    `truth.tsv` next to the read files.
    """
    dna.check_k(k)
    if length < 20 * k:
        raise InputError(f"genome length must be >= 20*k = {20 * k}, got {length}")
    if colors < 1:
        raise InputError("need at least one color")
    if n_snps < 0:
        raise InputError("n_snps must be >= 0")
    if read_length <= k:
        raise InputError(f"read length must exceed k={k}")
    rng = random.Random(seed)
    for _ in range(100):
        genome = clean_genome(rng, length, k)
        variants = _plant_variants(rng, genome, k, n_snps, colors, mode, pair_gap)
        if variants is not None:
            break
    else:
        raise InputError("could not plant variants without k-mer collisions")

    truth = PlantedTruth(
        seed, k, genome, variants, read_length, depth, error_rate, mode
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: list[tuple[str, list[Path]]] = []
    for color in range(colors):
        name = f"color{color}"
        reads = _simulate_reads(
            truth.genome_for(color), read_length, depth, rng, error_rate,
            max_step=read_length - k + 1,
        )
        path = out_dir / f"{name}.fasta"
        with open(path, "w", encoding="ascii") as out:
            for i, read in enumerate(reads):
                out.write(f">{name}_r{i}\n{read}\n")
        manifest.append((name, [path]))
    with open(out_dir / "manifest.tsv", "w", encoding="utf-8") as out:
        for name, paths in manifest:
            out.write(f"{name}\t{','.join(p.name for p in paths)}\n")
    with open(out_dir / "truth.tsv", "w", encoding="utf-8") as out:
        out.write("position\tref\talt\tcolor\n")
        for v in variants:
            out.write(f"{v.position}\t{v.ref}\t{v.alt}\t{v.color}\n")
    return manifest, truth


def _oracle_canonical(vertices: tuple[str, ...]) -> tuple[str, ...]:
    # deliberately re-implemented: the oracle shares nothing with the search
    best = vertices
    for direction in (vertices, vertices[::-1]):
        for r in range(len(direction)):
            rot = direction[r:] + direction[:r]
            if rot < best:
                best = rot
    return best


def _oracle_antipodal(path: Sequence[str], branching: set[str]) -> bool:
    length = len(path)
    if length % 2:
        return False
    half = length // 2
    return any(
        path[i] in branching and path[(i + half) % length] in branching
        for i in range(half)
    )


def brute_force_cycles(
    subgraph: Subgraph,
    start: str,
    allowed_lengths: Iterable[int],
    require_antipodal: bool = True,
) -> set[tuple[str, ...]]:
    """All simple cycles through `start`, by exhaustive backtracking.

    No depth bound, no pruning: every simple cycle is enumerated and then
    filtered by the allowed length set and (optionally) the requirement of an
    antipodal branching pair. Guarded to small subgraphs.
    """
    if len(subgraph) > ORACLE_VERTEX_CAP:
        raise ValueError(f"oracle limited to {ORACLE_VERTEX_CAP} vertices, got {len(subgraph)}")
    allowed = frozenset(allowed_lengths)
    adj = subgraph.adjacency
    branching = {v for v in subgraph.vertices if len(adj[v]) >= 3}
    results: set[tuple[str, ...]] = set()
    path = [start]
    on_path = {start}

    def recurse() -> None:
        for nb in adj[path[-1]]:
            if nb == start:
                if len(path) >= 3 and len(path) in allowed:
                    if not require_antipodal or _oracle_antipodal(path, branching):
                        results.add(_oracle_canonical(tuple(path)))
            elif nb not in on_path:
                path.append(nb)
                on_path.add(nb)
                recurse()
                on_path.discard(path.pop())

    recurse()
    return results


def score_calls(
    calls: Iterable[SnpCall],
    bubbles: Mapping[str, Bubble],
    truth: PlantedTruth,
) -> ScoreResult:
    """Match predicted calls against planted variants.

    A call matches a variant when the (2k+1)-base windows around the call's
    two alleles equal the base/mutated genome windows around the planted
    position, on either strand; window uniqueness (clean genomes) makes the
    match equivalent to position + allele-pair agreement.
    """
    k = truth.k
    expected: dict[frozenset[str], int] = {}
    for i, v in enumerate(truth.variants):
        lo, hi = v.position - k, v.position + k + 1
        base_win = truth.base_genome[lo:hi]
        alt_win = truth.genome_for(v.color)[lo:hi]
        expected[frozenset((base_win, alt_win))] = i
        expected[frozenset((dna.revcomp(base_win), dna.revcomp(alt_win)))] = i

    matched_variants: set[int] = set()
    matched_calls = 0
    predicted = 0
    for call in calls:
        if not call.predicted:
            continue
        predicted += 1
        bubble = bubbles[call.bubble_id]
        lo, hi = call.offset - k, call.offset + k + 1
        if lo < 0 or hi > len(bubble.label_a):
            continue
        pair = frozenset((bubble.label_a[lo:hi], bubble.label_b[lo:hi]))
        hit = expected.get(pair)
        if hit is not None:
            matched_calls += 1
            matched_variants.add(hit)

    planted = len(truth.variants)
    zero = predicted == 0 or planted == 0
    recall = len(matched_variants) / planted if planted else 1.0
    precision = matched_calls / predicted if predicted else 1.0
    return ScoreResult(
        recall=recall,
        precision=precision,
        matched_variants=len(matched_variants),
        matched_calls=matched_calls,
        predicted_calls=predicted,
        planted=planted,
        zero_denominator=zero,
    )
