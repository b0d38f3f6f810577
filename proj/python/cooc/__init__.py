"""Exact term-pair co-occurrence counting."""

from ._core import (  # noqa: F401
    Collection,
    ConfigError,
    ConsistencyError,
    ContractError,
    Error,
    FormatError,
    IngestError,
    IoError,
    RangeError,
    SizeError,
    brute_force_count,
    compute_stats,
    count,
    dictionary_path,
    forward_path,
    generate_corpus,
    ingest,
    ingest_file,
    merge_runs,
    methods,
    read_forward,
    read_run,
    read_terms,
    tokenize,
    top_pair,
    verify,
    write_forward,
    write_run,
)

__version__ = "1.0.0"
