"""Acceptance criteria, one test per criterion.

The conftest hook prints one `[ACCEPTANCE] <test>: PASS/FAIL/SKIP` line per
criterion; run with `pytest tests/test_acceptance.py -v` to see them inline.
"""
import os
import random
import time

import pytest

from picyc import dna
from picyc.cli import main
from picyc.cycles import SearchParams, search_cycles
from picyc.errors import PairMismatchError
from picyc.graph import build_graph, load_graph, save_graph
from picyc.index import build_index, load_index, save_index, shard_index
from picyc.neighborhood import branching_vertices, graph_neighborhood
from picyc.reads import parse_reads
from picyc.search import load_cycles, parallel_search
from picyc.testkit import brute_force_cycles, score_calls, synth_genomes
from picyc.variants import decompose, extract_coverage, mismatch_offsets, predict_snps

from conftest import random_sparse_subgraph


@pytest.fixture(scope="module")
def snp50(tmp_path_factory):
    """Criterion-2 dataset and full CLI pipeline: 10 kb, 2 colors, 50 SNPs, k=21, 30x."""
    root = tmp_path_factory.mktemp("snp50")
    data = root / "data"
    manifest, truth = synth_genomes(
        20_240, 10_000, 2, 50, "isolated", k=21, out_dir=data, depth=30, read_length=100
    )
    graph_path = root / "g.picyc"
    index_path = root / "g.idx"
    cycles_path = root / "cycles.json"
    call_prefix = root / "result"
    started = time.monotonic()
    assert main(["build", "--manifest", str(data / "manifest.tsv"), "-k", "21",
                 "--graph", str(graph_path)]) == 0
    assert main(["index", "--graph", str(graph_path), "--index", str(index_path)]) == 0
    assert main(["search", "--graph", str(graph_path), "--index", str(index_path),
                 "--out", str(cycles_path), "--threads", "1"]) == 0
    assert main(["call", "--graph", str(graph_path), "--cycles", str(cycles_path),
                 "--out", str(call_prefix)]) == 0
    elapsed = time.monotonic() - started
    return {
        "root": root,
        "truth": truth,
        "graph": graph_path,
        "index": index_path,
        "cycles": cycles_path,
        "prefix": call_prefix,
        "elapsed": elapsed,
    }


@pytest.fixture(scope="module")
def pair_k5(tmp_path_factory):
    """Criterion-3 dataset: two SNPs two bases apart, k=5."""
    root = tmp_path_factory.mktemp("pairk5")
    manifest, truth = synth_genomes(
        1101, 140, 2, 2, "clustered", k=5, out_dir=root, depth=8,
        read_length=40, pair_gap=2,
    )
    graph = build_graph(manifest, 5)
    index = build_index(graph)
    return graph, index, truth


@pytest.fixture(scope="module")
def colors10(tmp_path_factory):
    """Criterion-5 dataset: 10 colors, isolated variants, k=15."""
    root = tmp_path_factory.mktemp("colors10")
    data = root / "data"
    synth_genomes(
        5150, 3_000, 10, 27, "isolated", k=15, out_dir=data, depth=8, read_length=60
    )
    graph_path = root / "g.picyc"
    index_path = root / "g.idx"
    assert main(["build", "--manifest", str(data / "manifest.tsv"), "-k", "15",
                 "--graph", str(graph_path)]) == 0
    assert main(["index", "--graph", str(graph_path), "--index", str(index_path)]) == 0
    return root, graph_path, index_path


def _planted_k5_graph(tmp_path_factory, seed, n_snps, mode, **kwargs):
    out = tmp_path_factory.mktemp(f"k5_{seed}")
    manifest, truth = synth_genomes(
        seed, 150, 2, n_snps, mode, k=5, out_dir=out, depth=6, read_length=40, **kwargs
    )
    return build_graph(manifest, 5), truth


def test_c01_oracle_equivalence(tmp_path_factory):
    """search_cycles == brute_force_cycles on 100 random + all planted subgraphs."""
    started = time.monotonic()
    params = SearchParams(k=5, n_min=0, n_max=3, v_max=60)
    allowed = params.allowed_lengths()

    rng = random.Random(160_493)
    compared_graphs = 0
    positives = 0
    while compared_graphs < 100:
        sub = random_sparse_subgraph(rng, n_max=60)
        assert len(sub) <= 60
        starts = branching_vertices(sub)
        if not starts:
            continue
        for start in starts:
            got = set(search_cycles(sub, start, params).keys())
            want = brute_force_cycles(sub, start, allowed)
            assert got == want
            positives += len(want)
        compared_graphs += 1
    assert positives > 0  # the family must exercise non-empty results

    for seed, n_snps, mode, kwargs in (
        (71, 3, "isolated", {}),
        (72, 4, "clustered", {"pair_gap": 2}),
        (73, 2, "clustered", {"pair_gap": 3}),
    ):
        graph, _truth = _planted_k5_graph(tmp_path_factory, seed, n_snps, mode, **kwargs)
        for seed_kmer in build_index(graph).entries:
            sub = graph_neighborhood(graph, seed_kmer, 60)
            for start in branching_vertices(sub):
                got = set(search_cycles(sub, start, params).keys())
                want = brute_force_cycles(sub, start, allowed)
                assert got == want
    elapsed = time.monotonic() - started
    assert elapsed < 60, f"oracle comparison took {elapsed:.1f}s"


def test_c02_planted_snp_recovery(snp50):
    """50 isolated SNPs at k=21: Pred == 50, recall == precision == 1.0, offsets == k."""
    summary = dict(
        line.split("\t")
        for line in (snp50["root"] / "result.summary.tsv").read_text().strip().splitlines()
    )
    assert summary["Pred"] == "50"
    assert summary["Fil"] == "50"

    rows = (snp50["root"] / "result.variants.tsv").read_text().strip().splitlines()[1:]
    assert len(rows) == 50
    offsets = {int(row.split("\t")[1]) for row in rows}
    assert offsets == {21}
    assert all(row.split("\t")[4] == "true" for row in rows)

    graph = load_graph(snp50["graph"])
    doc = load_cycles(snp50["cycles"])
    bubbles = {}
    calls = []
    for cycle in doc["cycles"].values():
        bubble = decompose(cycle, graph, 21)
        bubbles[bubble.id] = bubble
        calls.extend(predict_snps(bubble, extract_coverage(bubble, graph)))
    score = score_calls(calls, bubbles, snp50["truth"])
    assert score.recall == 1.0
    assert score.precision == 1.0
    assert snp50["elapsed"] < 60, f"pipeline took {snp50['elapsed']:.1f}s"


def test_c03_clustered_variants_need_stretch(pair_k5):
    """Two SNPs 2 bp apart at k=5: nothing at n_max=0, one L=16 cycle at n_max >= 2."""
    graph, index, truth = pair_k5
    shard = shard_index(index, 0, 1)

    tight, _ = parallel_search(graph, shard, SearchParams(k=5, n_max=0, v_max=400))
    assert tight == {}

    for n_max in (2, 3):
        cycles, _ = parallel_search(graph, shard, SearchParams(k=5, n_max=n_max, v_max=400))
        assert len(cycles) == 1
        (cycle,) = cycles.values()
        assert len(cycle) == 16

    # cross-check with the exhaustive oracle on each fork's neighborhood
    for seed in index.entries:
        sub = graph_neighborhood(graph, seed, 60)
        for start in branching_vertices(sub):
            assert brute_force_cycles(sub, start, {12}) == set()
            found = brute_force_cycles(sub, start, {12, 14, 16})
            assert {len(c) for c in found} == {16}

    bubble = decompose(cycle, graph, 5)
    assert mismatch_offsets(bubble) == [5, 7]
    calls = predict_snps(bubble, extract_coverage(bubble, graph))
    assert len(calls) == 2
    assert all(call.predicted for call in calls)
    p1, p2 = (v.position for v in truth.variants)
    assert p2 - p1 == 2


def test_c04_thread_invariance(snp50, tmp_path):
    """Cycles file and variants TSV byte-identical for --threads 1, 2, 4, 8."""
    cycle_bytes = {}
    tsv_bytes = {}
    for threads in (1, 2, 4, 8):
        out = tmp_path / f"c{threads}.json"
        prefix = tmp_path / f"r{threads}"
        assert main(["search", "--graph", str(snp50["graph"]), "--index", str(snp50["index"]),
                     "--out", str(out), "--threads", str(threads),
                     "--vmax", "600", "--nmax", "2"]) == 0
        assert main(["call", "--graph", str(snp50["graph"]), "--cycles", str(out),
                     "--out", str(prefix)]) == 0
        cycle_bytes[threads] = out.read_bytes()
        tsv_bytes[threads] = (tmp_path / f"r{threads}.variants.tsv").read_bytes()
    assert len(set(cycle_bytes.values())) == 1
    assert len(set(tsv_bytes.values())) == 1


def test_c05_shard_completeness(colors10, tmp_path):
    """Merged --shard {0..4}/5 outputs equal the unsharded cycle set."""
    _root, graph_path, index_path = colors10
    common = ["--vmax", "200", "--nmax", "2"]
    whole = tmp_path / "whole.json"
    assert main(["search", "--graph", str(graph_path), "--index", str(index_path),
                 "--out", str(whole), *common]) == 0
    parts = []
    for i in range(5):
        part = tmp_path / f"part{i}.json"
        assert main(["search", "--graph", str(graph_path), "--index", str(index_path),
                     "--out", str(part), "--shard", f"{i}/5", *common]) == 0
        parts.append(str(part))
    merged = tmp_path / "merged.json"
    assert main(["merge-cycles", "--out", str(merged), *parts]) == 0
    merged_doc = load_cycles(merged)
    whole_doc = load_cycles(whole)
    assert merged_doc["cycles"] == whole_doc["cycles"]
    assert len(whole_doc["cycles"]) > 0


def _dense_interleaved_reads(root, seed, genome_len, colors, k, depth, read_length):
    """Ten near-copies of one genome, each diverging every ~1.5k bases.

    Bubbles from different colors interleave densely, so every neighborhood
    is a thicket of local cycles: per-entry search cost is high while each
    ball spans only a small genomic window. That is the regime where a fixed
    wall-clock budget leaves most of the index unconsumed.
    """
    from picyc.testkit import _simulate_reads, clean_genome

    rng = random.Random(seed)
    base = clean_genome(rng, genome_len, k)
    manifest = []
    for color in range(colors):
        seq = list(base)
        if color:
            pos = k + rng.randrange(2 * k)
            while pos < genome_len - k - 2:
                seq[pos] = rng.choice([b for b in dna.BASES if b != seq[pos]])
                pos += rng.randint(k + 2, 2 * k + 2)
        reads = _simulate_reads("".join(seq), read_length, depth, rng, 0.0)
        path = root / f"c{color}.fasta"
        path.write_text("".join(f">c{color}_r{i}\n{r}\n" for i, r in enumerate(reads)))
        manifest.append((f"c{color}", [path]))
    return manifest


def test_c06_scaling_shape(tmp_path_factory):
    """Under a 10 s budget, 8 workers find >= 3x the cycles of 1 worker."""
    if (os.cpu_count() or 1) < 8:
        pytest.skip(
            f"scaling criterion needs >= 8 hardware threads, have {os.cpu_count()}"
        )
    root = tmp_path_factory.mktemp("scaling")
    manifest = _dense_interleaved_reads(root, 4242, 24_000, 10, 11, 4, 60)
    graph = build_graph(manifest, 11)
    index = build_index(graph)
    shard = shard_index(index, 0, 1)
    found = {}
    consumed = {}
    for workers in (1, 8):
        cycles, stats = parallel_search(
            graph, shard,
            SearchParams(
                k=11, n_max=11, v_max=600, workers=workers,
                budget_seconds=10, chunk_size=16,
            ),
        )
        found[workers] = len(cycles)
        consumed[workers] = stats.entries_consumed
    assert consumed[1] < len(shard.entries), "budget must bite for 1 worker"
    assert found[8] > 0
    assert found[8] >= 3 * found[1], f"got {found[8]} vs {found[1]}"


def test_c07_diminishing_returns(tmp_path_factory):
    """Second half of a heavily interconnected index yields fewer new cycles."""
    root = tmp_path_factory.mktemp("diminish")
    manifest, _truth = synth_genomes(
        8_200, 6_000, 10, 120, "clustered", k=11, out_dir=root, depth=6, read_length=60
    )
    graph = build_graph(manifest, 11)
    index = build_index(graph)
    cycles, stats = parallel_search(
        graph, shard_index(index, 0, 1), SearchParams(k=11, n_max=4, v_max=300)
    )
    assert len(cycles) > 0
    rows = stats.rows
    half = len(rows) // 2
    first = sum(row.new_cycles for row in rows[:half])
    second = sum(row.new_cycles for row in rows[half:])
    assert first + second == len(cycles)
    assert second < first, f"first half {first}, second half {second}"


def test_c08_complexity_monotonicity(tmp_path_factory):
    """Mean subgraph complexity strictly grows with 2 -> 10 -> 25 colors."""
    per_color_snps = 6
    means = {}
    for colors in (2, 10, 25):
        root = tmp_path_factory.mktemp(f"cx{colors}")
        manifest, _truth = synth_genomes(
            400 + colors, 6_000, colors, per_color_snps * (colors - 1), "isolated",
            k=15, out_dir=root, depth=6, read_length=60,
        )
        graph = build_graph(manifest, 15)
        index = build_index(graph)
        _, stats = parallel_search(
            graph, shard_index(index, 0, 1), SearchParams(k=15, n_max=0, v_max=250)
        )
        means[colors] = sum(row.complexity for row in stats.rows) / len(stats.rows)
    assert means[2] < means[10] < means[25], means


def test_c09_round_trips(snp50, colors10, tmp_path):
    """Graph/index files round-trip bit-exact; FASTA re-parses; mismatches rejected."""
    graph = load_graph(snp50["graph"])
    resaved = tmp_path / "resaved.picyc"
    save_graph(graph, resaved)
    assert resaved.read_bytes() == snp50["graph"].read_bytes()

    index = load_index(snp50["index"], graph)
    resaved_idx = tmp_path / "resaved.idx"
    save_index(index, resaved_idx)
    assert resaved_idx.read_bytes() == snp50["index"].read_bytes()

    doc = load_cycles(snp50["cycles"])
    labels = {}
    for cycle in doc["cycles"].values():
        bubble = decompose(cycle, graph, 21)
        labels[f"{bubble.id}_A"] = bubble.label_a
        labels[f"{bubble.id}_B"] = bubble.label_b
    reparsed = dict(parse_reads(snp50["root"] / "result.fasta"))
    assert reparsed == labels

    _root, _graph10, index10 = colors10
    with pytest.raises(PairMismatchError):
        load_index(index10, graph)  # unrelated graph/index pair
    assert main(["search", "--graph", str(snp50["graph"]), "--index", str(index10),
                 "--out", str(tmp_path / "x.json")]) == 3


def test_c10_min_subgraph_guard(pair_k5, tmp_path_factory):
    """At k=5 no subgraph with <= 12 vertices or < 2 branching vertices is searched."""
    graph, index, _truth = pair_k5
    shard = shard_index(index, 0, 1)
    stats_seen = []
    for n_max in (0, 2, 3):
        _, stats = parallel_search(graph, shard, SearchParams(k=5, n_max=n_max, v_max=400))
        stats_seen.append(stats)
    iso_graph, _ = _planted_k5_graph(tmp_path_factory, 74, 3, "isolated")
    iso_shard = shard_index(build_index(iso_graph), 0, 1)
    _, iso_stats = parallel_search(iso_graph, iso_shard, SearchParams(k=5, n_max=3, v_max=60))
    stats_seen.append(iso_stats)
    for stats in stats_seen:
        if stats.subgraphs_searched:
            assert stats.searched_min_vertices > 2 * 5 + 2
            assert stats.searched_min_branching > 1

    # force tiny subgraphs: at the v_max floor nothing may enter the search
    cycles, floor_stats = parallel_search(
        iso_graph, iso_shard, SearchParams(k=5, n_max=3, v_max=12)
    )
    assert floor_stats.subgraphs_built > 0
    assert floor_stats.subgraphs_searched == 0
    assert floor_stats.searched_min_vertices is None
    assert cycles == {}
