"""FASTA/FASTQ read streaming with gzip and format auto-detection."""
from __future__ import annotations

import gzip
from pathlib import Path
from typing import IO, Iterator

from .errors import ReadParseError

GZIP_MAGIC = b"\x1f\x8b"


def _open_text(path: Path) -> IO[str]:
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == GZIP_MAGIC:
        return gzip.open(path, "rt", encoding="ascii")
    return open(path, "r", encoding="ascii")


def _parse_fasta(handle: IO[str], path: Path) -> Iterator[tuple[str, str]]:
    name: str | None = None
    chunks: list[str] = []
    for lineno, raw in enumerate(handle, start=1):
        line = raw.rstrip("\n")
        if line.startswith(">"):
            if name is not None:
                yield name, "".join(chunks).upper()
            name = line[1:].strip()
            chunks = []
        elif name is None:
            if line.strip():
                raise ReadParseError(f"{path}:{lineno}: sequence data before any '>' header")
        else:
            chunks.append(line.strip())
    if name is not None:
        yield name, "".join(chunks).upper()


def _parse_fastq(handle: IO[str], path: Path) -> Iterator[tuple[str, str]]:
    lineno = 0
    while True:
        header = handle.readline()
        if not header:
            return
        lineno += 1
        header = header.rstrip("\n")
        if not header.strip():
            continue
        if not header.startswith("@"):
            raise ReadParseError(f"{path}:{lineno}: expected '@' record header, got {header[:20]!r}")
        seq = handle.readline()
        plus = handle.readline()
        qual = handle.readline()
        if not qual:
            raise ReadParseError(f"{path}:{lineno}: incomplete FASTQ record")
        lineno += 3
        seq = seq.rstrip("\n")
        qual = qual.rstrip("\n")
        if not plus.startswith("+"):
            raise ReadParseError(f"{path}:{lineno - 1}: expected '+' separator line")
        if len(seq) != len(qual):
            raise ReadParseError(
                f"{path}:{lineno}: quality length {len(qual)} != sequence length {len(seq)}"
            )
        yield header[1:].strip(), seq.upper()


def parse_reads(path: str | Path, format: str = "auto") -> Iterator[tuple[str, str]]:
    """Stream (read id, uppercased bases) pairs from a FASTA or FASTQ file.

    Format is sniffed from the first byte ('>' vs '@') unless given explicitly;
    gzip input is detected by magic bytes. Qualities are read but ignored.
    A quality line whose length disagrees with the sequence raises
    ReadParseError naming the offending line.
    """
    path = Path(path)
    if format not in ("auto", "fasta", "fastq"):
        raise ValueError(f"unknown format {format!r}")
    handle = _open_text(path)
    try:
        if format == "auto":
            first = handle.read(1)
            handle.seek(0)
            if first == "":
                return
            if first == ">":
                format = "fasta"
            elif first == "@":
                format = "fastq"
            else:
                raise ReadParseError(f"{path}:1: cannot detect format from first byte {first!r}")
        parser = _parse_fasta if format == "fasta" else _parse_fastq
        yield from parser(handle, path)
    finally:
        handle.close()
