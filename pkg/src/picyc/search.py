"""Shard-level parallel driver: subgraphs, cycle search, dedup, stats, artifacts.

Workers (processes, so the traversal really runs in parallel) pull fixed-size
chunks of index entries from a shared queue. Each entry grows a neighborhood,
and if the subgraph passes the size/branching guard, cycles are enumerated
from its branching vertices. Results merge by canonical cycle form with an
order-independent tie rule, so the final set and the per-entry statistics are
identical for any worker count.
"""
from __future__ import annotations

import json
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cycles import Cycle, SearchParams, search_cycles
from .errors import FileFormatError, PairMismatchError
from .graph import ColoredGraph
from .index import IndexShard, partition_for_workers, select_fraction
from .neighborhood import branching_vertices, graph_neighborhood

CYCLES_FORMAT = "picyc-cycles"
CYCLES_VERSION = 1

STATS_CSV_HEADER = (
    "entry_position,new_cycles,cumulative_cycles,subgraph_vertices,subgraph_edges,complexity"
)

# (position, vertices, edges, branching count, searched?, {canonical: branch pair})
_EntryRecord = tuple[int, int, int, int, bool, dict[tuple[str, ...], tuple[int, int]]]


@dataclass
class EntryStat:
    position: int
    new_cycles: int
    cumulative_cycles: int
    subgraph_vertices: int
    subgraph_edges: int
    complexity: float


@dataclass
class SearchStats:
    shard_entries: int
    selected_entries: int
    entries_consumed: int
    subgraphs_built: int
    subgraphs_searched: int
    cycles_found: int
    elapsed_seconds: float
    searched_min_vertices: int | None
    searched_min_branching: int | None
    rows: list[EntryStat]

    def report(self) -> str:
        """Single-record plain-text summary."""
        lines = [
            f"shard_entries\t{self.shard_entries}",
            f"selected_entries\t{self.selected_entries}",
            f"entries_consumed\t{self.entries_consumed}",
            f"subgraphs_built\t{self.subgraphs_built}",
            f"subgraphs_searched\t{self.subgraphs_searched}",
            f"cycles_found\t{self.cycles_found}",
            f"elapsed_seconds\t{self.elapsed_seconds:.3f}",
        ]
        return "\n".join(lines)


def _process_entry(
    graph: ColoredGraph, params: SearchParams, position: int, seed: str
) -> _EntryRecord:
    """Build one neighborhood and, if the guard admits it, search it."""
    subgraph = graph_neighborhood(graph, seed, params.v_max)
    branching = branching_vertices(subgraph)
    cycles: dict[tuple[str, ...], tuple[int, int]] = {}
    # guard: more than one branching vertex and strictly larger than the
    # smallest subgraph that could hold a 2k+2 cycle
    searched = len(branching) > 1 and len(subgraph) > params.min_subgraph_size
    if searched:
        assert len(subgraph) > 2 * params.k + 2 and len(branching) > 1
        for start in branching:
            for canon, cycle in search_cycles(
                subgraph, start, params, only_min_branching=True
            ).items():
                prev = cycles.get(canon)
                if prev is None or cycle.branch_positions < prev:
                    cycles[canon] = cycle.branch_positions
    return (
        position,
        len(subgraph),
        subgraph.edge_count,
        len(branching),
        searched,
        cycles,
    )


_worker_graph: ColoredGraph | None = None
_worker_params: SearchParams | None = None


def _init_worker(graph: ColoredGraph, params: SearchParams) -> None:
    global _worker_graph, _worker_params
    _worker_graph = graph
    _worker_params = params


def _run_chunk(
    entries: list[tuple[int, str]], deadline: float | None
) -> list[_EntryRecord]:
    """Process one chunk; the deadline is re-checked between entries, so an
    in-flight subgraph always finishes but no new entry starts past it."""
    records = []
    for position, seed in entries:
        if deadline is not None and time.monotonic() > deadline:
            break
        records.append(_process_entry(_worker_graph, _worker_params, position, seed))
    return records


def parallel_search(
    graph: ColoredGraph, shard: IndexShard, params: SearchParams
) -> tuple[dict[tuple[str, ...], Cycle], SearchStats]:
    """Search every (fraction-selected) entry of a shard; merge by canonical form.

    The merged cycle set is independent of the worker count; per-entry
    statistics are computed in entry order after the parallel phase, so the
    stats rows are scheduling-independent too. A wall-clock budget stops the
    consumption of new entries but lets in-flight work finish, which can
    overrun the budget slightly.
    """
    if shard.fingerprint != graph.fingerprint:
        raise PairMismatchError(
            f"shard/graph pair mismatch (shard {shard.fingerprint:#x}, "
            f"graph {graph.fingerprint:#x})"
        )
    selected = select_fraction(shard, params.fraction, params.fraction_mode)
    chunks = partition_for_workers(selected, params.workers, params.chunk_size)
    started = time.monotonic()
    deadline = None if params.budget_seconds is None else started + params.budget_seconds

    records: list[_EntryRecord] = []
    if params.workers == 1:
        stop = False
        for chunk in chunks:
            for position in chunk:
                if deadline is not None and time.monotonic() > deadline:
                    stop = True
                    break
                records.append(
                    _process_entry(graph, params, position, selected.entries[position])
                )
            if stop:
                break
    else:
        ctx = multiprocessing.get_context(
            "fork" if "fork" in multiprocessing.get_all_start_methods() else None
        )
        with ProcessPoolExecutor(
            max_workers=params.workers,
            mp_context=ctx,
            initializer=_init_worker,
            initargs=(graph, params),
        ) as pool:
            futures = [
                pool.submit(
                    _run_chunk,
                    [(pos, selected.entries[pos]) for pos in chunk],
                    deadline,
                )
                for chunk in chunks
            ]
            for future in futures:
                records.extend(future.result())
    elapsed = time.monotonic() - started

    # deterministic merge + per-entry stats, in entry order
    records.sort(key=lambda rec: rec[0])
    merged: dict[tuple[str, ...], Cycle] = {}
    rows: list[EntryStat] = []
    searched_count = 0
    cumulative = 0
    min_vertices: int | None = None
    min_branching: int | None = None
    for position, n_vertices, n_edges, n_branching, searched, cycles in records:
        new = 0
        for canon, pair in sorted(cycles.items()):
            existing = merged.get(canon)
            if existing is None:
                merged[canon] = Cycle(canon, pair)
                new += 1
            elif pair < existing.branch_positions:
                merged[canon] = Cycle(canon, pair)
        if searched:
            searched_count += 1
            if min_vertices is None or n_vertices < min_vertices:
                min_vertices = n_vertices
            if min_branching is None or n_branching < min_branching:
                min_branching = n_branching
        cumulative += new
        rows.append(
            EntryStat(
                position=position,
                new_cycles=new,
                cumulative_cycles=cumulative,
                subgraph_vertices=n_vertices,
                subgraph_edges=n_edges,
                complexity=n_edges / n_vertices,
            )
        )
    ordered = {canon: merged[canon] for canon in sorted(merged)}
    stats = SearchStats(
        shard_entries=len(shard.entries),
        selected_entries=len(selected.entries),
        entries_consumed=len(records),
        subgraphs_built=len(records),
        subgraphs_searched=searched_count,
        cycles_found=len(ordered),
        elapsed_seconds=elapsed,
        searched_min_vertices=min_vertices,
        searched_min_branching=min_branching,
        rows=rows,
    )
    return ordered, stats


def write_stats_csv(stats: SearchStats, path: str | Path) -> None:
    """Per-entry discovery curve, one row per consumed index entry."""
    with open(path, "w", encoding="ascii") as out:
        out.write(STATS_CSV_HEADER + "\n")
        for row in stats.rows:
            out.write(
                f"{row.position},{row.new_cycles},{row.cumulative_cycles},"
                f"{row.subgraph_vertices},{row.subgraph_edges},{row.complexity:.6f}\n"
            )


def write_cycles_doc(doc: dict, path: str | Path) -> None:
    """Serialize a cycles document (in-memory form, as load_cycles returns)."""
    encoded = dict(doc)
    encoded["fraction"] = str(Fraction(doc["fraction"]))
    encoded["cycles"] = [
        {"vertices": list(canon), "branch": list(cycle.branch_positions)}
        for canon, cycle in sorted(doc["cycles"].items())
    ]
    with open(path, "w", encoding="ascii") as out:
        json.dump(encoded, out, sort_keys=True, separators=(",", ":"))
        out.write("\n")


def save_cycles(
    path: str | Path,
    cycles: dict[tuple[str, ...], Cycle],
    *,
    k: int,
    fingerprint: int,
    index_size: int,
    shard_id: int,
    shard_count: int,
    params: SearchParams,
    entries_consumed: int,
    subgraphs: int,
) -> None:
    """Serialize found cycles in bubble-ready form.

    Content is fully deterministic for a given input set (no timings, no
    worker counts), so reruns and different thread counts produce identical
    bytes.
    """
    doc = {
        "format": CYCLES_FORMAT,
        "version": CYCLES_VERSION,
        "k": k,
        "fingerprint": fingerprint,
        "index_size": index_size,
        "shard": [shard_id, shard_count],
        "n_min": params.n_min,
        "n_max": params.n_max,
        "v_max": params.v_max,
        "fraction": params.fraction,
        "fraction_mode": params.fraction_mode,
        "entries_consumed": entries_consumed,
        "subgraphs": subgraphs,
        "cycles": cycles,
    }
    write_cycles_doc(doc, path)


def load_cycles(path: str | Path) -> dict:
    """Read a cycles file; returns its metadata with Cycle objects rebuilt."""
    try:
        with open(path, "r", encoding="ascii") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not a cycles file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != CYCLES_FORMAT:
        raise FileFormatError(f"{path}: not a cycles file")
    if doc.get("version") != CYCLES_VERSION:
        raise FileFormatError(f"{path}: unsupported cycles version {doc.get('version')}")
    cycles: dict[tuple[str, ...], Cycle] = {}
    for item in doc["cycles"]:
        canon = tuple(item["vertices"])
        cycles[canon] = Cycle(canon, tuple(item["branch"]))
    doc["cycles"] = cycles
    doc["fraction"] = Fraction(doc["fraction"])
    return doc


def merge_cycle_docs(docs: list[dict]) -> dict:
    """Union several cycles files (e.g. per-shard outputs) by canonical form.

    All inputs must stem from the same graph; consumed/subgraph counters add
    up, the branch-position tie rule matches parallel_search's.
    """
    if not docs:
        raise ValueError("nothing to merge")
    first = docs[0]
    merged: dict[tuple[str, ...], Cycle] = {}
    consumed = 0
    subgraphs = 0
    for doc in docs:
        if doc["fingerprint"] != first["fingerprint"] or doc["k"] != first["k"]:
            raise PairMismatchError("cycles files come from different graphs")
        consumed += doc["entries_consumed"]
        subgraphs += doc["subgraphs"]
        for canon, cycle in doc["cycles"].items():
            existing = merged.get(canon)
            if existing is None or cycle.branch_positions < existing.branch_positions:
                merged[canon] = cycle
    out = dict(first)
    out["cycles"] = {canon: merged[canon] for canon in sorted(merged)}
    out["entries_consumed"] = consumed
    out["subgraphs"] = subgraphs
    out["shard"] = [0, 1]
    return out
