"""Corpus enumeration and per-function context extraction."""
from sigtype.extract.corpus import (
    ExtractionStats,
    ManifestEntry,
    ProjectManifest,
    SourceFile,
    enumerate_sources,
    load_manifest,
)
from sigtype.extract.docstrings import DocstringInfo, parse_docstring
from sigtype.extract.functions import (
    JSON_KEYS,
    RawFunction,
    extract_corpus,
    extract_functions,
    extract_return_identifiers,
    normalize_annotation,
    parse_module,
    read_functions,
    write_functions,
)

__all__ = [
    "DocstringInfo",
    "ExtractionStats",
    "JSON_KEYS",
    "ManifestEntry",
    "ProjectManifest",
    "RawFunction",
    "SourceFile",
    "enumerate_sources",
    "extract_corpus",
    "extract_functions",
    "extract_return_identifiers",
    "load_manifest",
    "normalize_annotation",
    "parse_docstring",
    "parse_module",
    "read_functions",
    "write_functions",
]
