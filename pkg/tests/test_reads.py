import gzip

import pytest

from picyc.errors import ReadParseError
from picyc.reads import parse_reads


def _write(tmp_path, name, text, compress=False):
    path = tmp_path / name
    if compress:
        with gzip.open(path, "wt") as out:
            out.write(text)
    else:
        path.write_text(text)
    return path


def test_single_fasta_record(tmp_path):
    path = _write(tmp_path, "r.fa", ">r1\nACGT\n")
    assert list(parse_reads(path)) == [("r1", "ACGT")]


def test_single_fastq_record(tmp_path):
    path = _write(tmp_path, "r.fq", "@r1\nACGT\n+\nIIII\n")
    assert list(parse_reads(path)) == [("r1", "ACGT")]


def test_fastq_quality_length_mismatch_names_line(tmp_path):
    path = _write(tmp_path, "r.fq", "@r1\nACGT\n+\nIII\n")
    with pytest.raises(ReadParseError) as err:
        list(parse_reads(path))
    assert ":4" in str(err.value)  # the quality line


def test_multiline_fasta_and_uppercasing(tmp_path):
    path = _write(tmp_path, "r.fa", ">a desc\nacg\nt\n>b\nggg\n")
    assert list(parse_reads(path)) == [("a desc", "ACGT"), ("b", "GGG")]


def test_gzip_autodetect(tmp_path):
    path = _write(tmp_path, "r.fa.gz", ">r1\nACGT\n", compress=True)
    assert list(parse_reads(path)) == [("r1", "ACGT")]


def test_gzip_fastq(tmp_path):
    path = _write(tmp_path, "r.fq.gz", "@r1\nacgt\n+\n!!!!\n", compress=True)
    assert list(parse_reads(path)) == [("r1", "ACGT")]


def test_format_autodetect_failure(tmp_path):
    path = _write(tmp_path, "r.txt", "garbage\n")
    with pytest.raises(ReadParseError):
        list(parse_reads(path))


def test_empty_file_yields_nothing(tmp_path):
    path = _write(tmp_path, "empty.fa", "")
    assert list(parse_reads(path)) == []


def test_explicit_format_overrides_sniffing(tmp_path):
    path = _write(tmp_path, "r.fa", ">r1\nACGT\n")
    assert list(parse_reads(path, format="fasta")) == [("r1", "ACGT")]
    with pytest.raises(ReadParseError):
        list(parse_reads(path, format="fastq"))


def test_unknown_format_rejected(tmp_path):
    path = _write(tmp_path, "r.fa", ">r1\nACGT\n")
    with pytest.raises(ValueError):
        list(parse_reads(path, format="sam"))


def test_truncated_fastq_record(tmp_path):
    path = _write(tmp_path, "r.fq", "@r1\nACGT\n")
    with pytest.raises(ReadParseError):
        list(parse_reads(path))


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        list(parse_reads(tmp_path / "absent.fa"))


def test_stream_is_single_pass_order_preserving(tmp_path):
    records = [(f"r{i}", "ACGT") for i in range(5)]
    text = "".join(f">{name}\n{seq}\n" for name, seq in records)
    path = _write(tmp_path, "many.fa", text)
    assert list(parse_reads(path)) == records
