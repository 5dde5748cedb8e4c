"""Command-line pipeline: build -> index -> search -> call, plus bench/synth.

The pipeline is staged through files so that shards can run as independent
processes (one invocation per --shard i/N) and be merged afterwards; every
command writes byte-identical output for identical inputs and flags.

Exit codes: 0 success, 2 input error, 3 artifact mismatch, 4 internal error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cycles import SearchParams
from .errors import (
    FileFormatError,
    InputError,
    OrientationError,
    PairMismatchError,
    PicycError,
    ReadParseError,
)
from .graph import build_graph, load_graph, load_manifest, save_graph
from .index import DEFAULT_CHUNK, build_index, load_index, save_index, shard_index
from .search import (
    load_cycles,
    merge_cycle_docs,
    parallel_search,
    save_cycles,
    write_cycles_doc,
    write_stats_csv,
)
from .testkit import synth_genomes
from .variants import (
    decompose,
    extract_coverage,
    filter_bubbles,
    predict_snps,
    write_fasta,
    write_variants,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MISMATCH = 3
EXIT_INTERNAL = 4


@dataclass
class RunConfig:
    """Validated knobs shared by the search-stage commands."""

    k: int
    v_max: int
    n_min: int
    n_max: int | None
    fraction: Fraction
    fraction_mode: str
    workers: int
    shard_id: int
    shard_count: int
    budget_seconds: float | None
    chunk_size: int

    def search_params(self) -> SearchParams:
        return SearchParams(
            k=self.k,
            n_min=self.n_min,
            n_max=self.n_max,
            v_max=self.v_max,
            fraction=self.fraction,
            fraction_mode=self.fraction_mode,
            workers=self.workers,
            budget_seconds=self.budget_seconds,
            chunk_size=self.chunk_size,
        )


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("PICYC_THREADS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"PICYC_THREADS={env!r} is not an integer") from exc
    return 1


def _shard(raw: str) -> tuple[int, int]:
    try:
        left, right = raw.split("/", 1)
        shard_id, shard_count = int(left), int(right)
    except ValueError as exc:
        raise InputError(f"--shard expects I/N, got {raw!r}") from exc
    if not 0 <= shard_id < shard_count:
        raise InputError(f"shard id {shard_id} out of range for {shard_count} shards")
    return shard_id, shard_count


def _fraction(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--fraction expects a rational like 1/3, got {raw!r}") from exc


def _config(args: argparse.Namespace, k: int) -> RunConfig:
    shard_id, shard_count = _shard(args.shard)
    return RunConfig(
        k=k,
        v_max=args.vmax,
        n_min=args.nmin,
        n_max=args.nmax,
        fraction=_fraction(args.fraction),
        fraction_mode=args.fraction_mode,
        workers=_threads(args),
        shard_id=shard_id,
        shard_count=shard_count,
        budget_seconds=args.budget_seconds,
        chunk_size=args.chunk,
    )


def cmd_build(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    graph = build_graph(manifest, args.k)
    save_graph(graph, args.graph)
    print(f"colors\t{len(graph.colors)}", file=sys.stderr)
    print(f"nodes\t{len(graph)}", file=sys.stderr)
    for color, name in enumerate(graph.colors):
        print(f"mass[{name}]\t{graph.color_mass(color)}", file=sys.stderr)
    print(f"fingerprint\t{graph.fingerprint:#018x}", file=sys.stderr)
    return EXIT_OK


def cmd_index(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    index = build_index(graph)
    save_index(index, args.index)
    print(f"index_entries\t{len(index)}", file=sys.stderr)
    print(f"fingerprint\t{index.fingerprint:#018x}", file=sys.stderr)
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    index = load_index(args.index, graph)
    config = _config(args, graph.k)
    shard = shard_index(index, config.shard_id, config.shard_count)
    params = config.search_params()
    cycles, stats = parallel_search(graph, shard, params)
    save_cycles(
        args.out,
        cycles,
        k=graph.k,
        fingerprint=graph.fingerprint,
        index_size=len(index),
        shard_id=config.shard_id,
        shard_count=config.shard_count,
        params=params,
        entries_consumed=stats.entries_consumed,
        subgraphs=stats.subgraphs_built,
    )
    stats_path = args.stats if args.stats else str(args.out) + ".stats.csv"
    write_stats_csv(stats, stats_path)
    print(stats.report(), file=sys.stderr)
    return EXIT_OK


def cmd_call(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    doc = load_cycles(args.cycles)
    if doc["fingerprint"] != graph.fingerprint:
        raise PairMismatchError(
            f"cycles/graph pair mismatch (cycles {doc['fingerprint']:#x}, "
            f"graph {graph.fingerprint:#x})"
        )
    k = doc["k"]
    bubbles = []
    indel_like = 0
    for cycle in doc["cycles"].values():
        bubble = decompose(cycle, graph, k)
        if len(bubble.label_a) != len(bubble.label_b):
            indel_like += 1  # unequal paths carry no SNP offsets; stat only
            continue
        bubbles.append(bubble)
    kept = filter_bubbles(bubbles, args.mismatch_cap)
    calls = []
    predicted_bubbles = 0
    for bubble in kept:
        coverage = extract_coverage(bubble, graph)
        bubble_calls = predict_snps(bubble, coverage, args.cmin)
        if any(c.predicted for c in bubble_calls):
            predicted_bubbles += 1
        calls.extend(bubble_calls)
    out = Path(args.out)
    write_fasta(kept, f"{out}.fasta")
    write_variants(calls, graph.colors, f"{out}.variants.tsv")
    summary = [
        ("Cyc", len(doc["cycles"])),
        ("Fil", len(kept)),
        ("Pred", sum(1 for c in calls if c.predicted)),
        ("PredBubbles", predicted_bubbles),
        ("SubG", doc["subgraphs"]),
        ("Index", doc["index_size"]),
        ("Indels", indel_like),
    ]
    text = "\n".join(f"{key}\t{value}" for key, value in summary)
    with open(f"{out}.summary.tsv", "w", encoding="ascii") as fh:
        fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    index = load_index(args.index, graph)
    try:
        worker_list = [int(w) for w in args.workers.split(",") if w.strip()]
    except ValueError as exc:
        raise InputError(f"--workers expects a comma list of ints, got {args.workers!r}") from exc
    if not worker_list:
        raise InputError("--workers lists no worker counts")
    rows = []
    for workers in worker_list:
        config = _config(args, graph.k)
        config.workers = workers
        shard = shard_index(index, config.shard_id, config.shard_count)
        cycles, stats = parallel_search(graph, shard, config.search_params())
        rows.append((workers, len(cycles), stats.entries_consumed, stats.elapsed_seconds))
        print(
            f"workers={workers} cycles={len(cycles)} "
            f"consumed={stats.entries_consumed} elapsed={stats.elapsed_seconds:.2f}s",
            file=sys.stderr,
        )
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("workers,cycles,entries_consumed,elapsed_seconds\n")
        for workers, cycles_found, consumed, elapsed in rows:
            fh.write(f"{workers},{cycles_found},{consumed},{elapsed:.3f}\n")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    manifest, truth = synth_genomes(
        args.seed,
        args.length,
        args.colors,
        args.snps,
        args.mode,
        k=args.k,
        out_dir=args.out_dir,
        read_length=args.read_length,
        depth=args.depth,
        error_rate=args.error_rate,
        pair_gap=args.pair_gap,
    )
    print(f"out_dir\t{args.out_dir}", file=sys.stderr)
    print(f"colors\t{len(manifest)}", file=sys.stderr)
    print(f"variants\t{len(truth.variants)}", file=sys.stderr)
    return EXIT_OK


def cmd_merge_cycles(args: argparse.Namespace) -> int:
    docs = [load_cycles(path) for path in args.inputs]
    merged = merge_cycle_docs(docs)
    write_cycles_doc(merged, args.out)
    print(f"cycles\t{len(merged['cycles'])}", file=sys.stderr)
    return EXIT_OK


def _add_search_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--vmax", type=int, default=5000, help="max vertices per subgraph")
    sub.add_argument("--nmin", type=int, default=0, help="smallest cycle stretch n")
    sub.add_argument("--nmax", type=int, default=None, help="largest cycle stretch n (default k)")
    sub.add_argument("--fraction", default="1", help="index fraction to search, e.g. 1/3")
    sub.add_argument(
        "--fraction-mode", choices=("strided", "prefix"), default="strided",
        help="how the fraction samples the index",
    )
    sub.add_argument("--threads", type=int, default=None,
                     help="worker count (default: $PICYC_THREADS or 1)")
    sub.add_argument("--shard", default="0/1", help="shard I/N of the index to search")
    sub.add_argument("--budget-seconds", type=float, default=None,
                     help="stop consuming new index entries after this long")
    sub.add_argument("--chunk", type=int, default=DEFAULT_CHUNK,
                     help="entries per dynamic work chunk")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="picyc",
        description="Reference-free SNP discovery by cycle search in a colored de Bruijn graph.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("build", help="build the colored graph from reads")
    p.add_argument("--manifest", required=True, help="sample-name<TAB>read-paths per line")
    p.add_argument("-k", type=int, required=True, help="k-mer size (odd, 3..63)")
    p.add_argument("--graph", required=True, help="output graph file")
    p.set_defaults(func=cmd_build)

    p = commands.add_parser("index", help="extract the branching-vertex index")
    p.add_argument("--graph", required=True)
    p.add_argument("--index", required=True, help="output index file")
    p.set_defaults(func=cmd_index)

    p = commands.add_parser("search", help="enumerate cycles over an index shard")
    p.add_argument("--graph", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True, help="output cycles file")
    p.add_argument("--stats", default=None, help="per-entry stats CSV (default <out>.stats.csv)")
    _add_search_flags(p)
    p.set_defaults(func=cmd_search)

    p = commands.add_parser("call", help="decompose cycles into bubbles and predict SNPs")
    p.add_argument("--graph", required=True)
    p.add_argument("--cycles", required=True, help="cycles file from `search` or `merge-cycles`")
    p.add_argument("--out", required=True, help="output prefix (.fasta, .variants.tsv, .summary.tsv)")
    p.add_argument("-f", "--mismatch-cap", type=int, default=15,
                   help="max mismatching positions per bubble")
    p.add_argument("--cmin", type=int, default=1, help="min interior coverage for path support")
    p.set_defaults(func=cmd_call)

    p = commands.add_parser("bench", help="run search for several worker counts")
    p.add_argument("--graph", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--workers", required=True, help="comma list of worker counts, e.g. 1,8")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bench)

    p = commands.add_parser("synth", help="generate planted-variant read sets")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--length", type=int, required=True, help="genome length (>= 20k)")
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--snps", type=int, required=True)
    p.add_argument("--mode", choices=("isolated", "clustered"), default="isolated")
    p.add_argument("--read-length", type=int, default=100)
    p.add_argument("--depth", type=int, default=30)
    p.add_argument("--error-rate", type=float, default=0.0)
    p.add_argument("--pair-gap", type=int, default=None,
                   help="clustered mode: distance between paired variants")
    p.set_defaults(func=cmd_synth)

    p = commands.add_parser("merge-cycles", help="union per-shard cycles files")
    p.add_argument("--out", required=True)
    p.add_argument("inputs", nargs="+", help="cycles files to merge")
    p.set_defaults(func=cmd_merge_cycles)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PairMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (OrientationError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, ReadParseError, FileFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PicycError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
