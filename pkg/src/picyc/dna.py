"""Nucleotide primitives: reverse complement, canonical k-mers, windowing, 2-bit packing."""
from __future__ import annotations

import re

BASES = "ACGT"
K_MIN = 3
K_MAX = 63

_REVCOMP = str.maketrans("ACGT", "TGCA")
_SEGMENT_SPLIT = re.compile("[^ACGT]+")

# 2-bit code per base, A=00 C=01 G=10 T=11, packed most-significant-first.
_BASE_CODE = {b: i for i, b in enumerate(BASES)}
_BYTE_TO_QUAD = [
    "".join(BASES[(byte >> shift) & 3] for shift in (6, 4, 2, 0)) for byte in range(256)
]


def check_k(k: int) -> int:
    """Validate a k-mer size: odd, within [3, 63].

    Oddness forbids self-complementary k-mers, so every k-mer has a strand
    orientation distinct from its reverse complement.
    """
    if not isinstance(k, int) or not (K_MIN <= k <= K_MAX):
        raise ValueError(f"k must be an integer in [{K_MIN}, {K_MAX}], got {k!r}")
    if k % 2 == 0:
        raise ValueError(f"k must be odd, got {k}")
    return k


def revcomp(seq: str) -> str:
    """Reverse complement of an A/C/G/T string."""
    return seq.translate(_REVCOMP)[::-1]


def canonicalize(kmer: str) -> str:
    """Lexicographically smaller of a k-mer and its reverse complement (A<C<G<T)."""
    rc = revcomp(kmer)
    return kmer if kmer <= rc else rc


def is_canonical(kmer: str) -> bool:
    return kmer <= revcomp(kmer)


def clean_segments(read: str) -> list[str]:
    """Maximal runs of A/C/G/T in a read (non-ACGT symbols split, never emit)."""
    return [seg for seg in _SEGMENT_SPLIT.split(read) if seg]


def kmerize(read: str, k: int) -> list[str]:
    """All k-length windows of a read, splitting at non-ACGT symbols.

    Each maximal clean segment of length >= k contributes its consecutive
    windows; shorter segments contribute nothing. Input is expected uppercase.
    """
    check_k(k)
    out: list[str] = []
    for segment in clean_segments(read):
        if len(segment) < k:
            continue
        out.extend(segment[i : i + k] for i in range(len(segment) - k + 1))
    return out


def packed_size(k: int) -> int:
    """Bytes needed to store one k-mer at 2 bits per base."""
    return (k + 3) // 4


def pack_kmer(kmer: str) -> bytes:
    """Pack a k-mer into 2-bit codes, first base in the high bits of byte 0."""
    code = 0
    for base in kmer:
        code = (code << 2) | _BASE_CODE[base]
    nbytes = packed_size(len(kmer))
    code <<= nbytes * 8 - 2 * len(kmer)  # pad bits sit in the low end
    return code.to_bytes(nbytes, "big")


def unpack_kmer(data: bytes, k: int) -> str:
    """Inverse of pack_kmer."""
    if len(data) != packed_size(k):
        raise ValueError(f"expected {packed_size(k)} bytes for k={k}, got {len(data)}")
    quads = "".join(_BYTE_TO_QUAD[b] for b in data)
    return quads[:k]
