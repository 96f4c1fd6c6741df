"""Text normalization, identifier splitting, lemmatization and stopword removal."""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Literal

_DATA_PACKAGE = "sigtype.nlp.data"
STOPWORDS_FILE = "stopwords.txt"
LEMMAS_FILE = "lemmas.tsv"

_LINE_BREAKS = re.compile(r"[\r\n]+")
# A period ends a sentence when followed by whitespace then an uppercase letter,
# or by the end of the text (trailing whitespace allowed).
_SENTENCE_STOP = re.compile(r"\.(?=\s+[A-Z]|\s*$)")
_NON_ALPHA = re.compile(r"[^A-Za-z]+")
_CAMEL_WORDS = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+")
_LETTER_RUNS = re.compile(r"[A-Za-z]+")


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    kind: Literal["comment", "identifier"]

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)


def _read_resource(name: str) -> str:
    return resources.files(_DATA_PACKAGE).joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    return frozenset(
        line.strip() for line in _read_resource(STOPWORDS_FILE).splitlines() if line.strip()
    )


@lru_cache(maxsize=None)
def lemma_table() -> dict[str, str]:
    table = {}
    for line in _read_resource(LEMMAS_FILE).splitlines():
        if not line.strip():
            continue
        inflected, lemma = line.split("\t")
        table[inflected] = lemma
    return table


def resource_hashes() -> dict[str, str]:
    """SHA-256 digests of the bundled stopword and lemma files."""
    return {
        name: hashlib.sha256(_read_resource(name).encode("utf-8")).hexdigest()
        for name in (STOPWORDS_FILE, LEMMAS_FILE)
    }


def normalize_text(text: str) -> str:
    """Lowercase ``text`` and reduce it to space-separated alphabetic runs.

    Line breaks are dropped, sentence-final full stops are deleted and every
    other non-alphabetic character (including mid-sentence periods such as in
    ``object.property``) becomes a space.
    """
    text = _LINE_BREAKS.sub(" ", text)
    text = _SENTENCE_STOP.sub("", text)
    text = text.replace(".", " ")
    text = _NON_ALPHA.sub(" ", text)
    return " ".join(text.lower().split())


def split_identifier(name: str) -> list[str]:
    """Split snake_case / camelCase / acronym boundaries into lowercase words.

    >>> split_identifier("HTTPServer2")
    ['http', 'server']
    """
    words = []
    for run in _LETTER_RUNS.findall(name):
        words.extend(w.lower() for w in _CAMEL_WORDS.findall(run))
    return words


def lemmatize(token: str) -> str:
    return lemma_table().get(token, token)


_INTERIOR_CASE = re.compile(r"[a-z][A-Z]|[A-Z]{2}[a-z]")


def preprocess_comment(text: str | None) -> TokenSequence:
    if not text:
        return TokenSequence((), "comment")
    # Camel-split only words with interior case changes, so sentence
    # punctuation survives for normalize_text.
    pieces = []
    for word in text.split():
        if _INTERIOR_CASE.search(word):
            word = " ".join(split_identifier(word)) + ("." if word.endswith(".") else "")
        pieces.append(word)
    normalized = normalize_text(" ".join(pieces))
    stop = stopwords()
    lemmas = (lemmatize(tok) for tok in normalized.split())
    return TokenSequence(tuple(tok for tok in lemmas if tok not in stop), "comment")


def preprocess_identifier(name: str | None) -> TokenSequence:
    if not name:
        return TokenSequence((), "identifier")
    words = []
    for word in split_identifier(name):
        words.extend(normalize_text(word).split())
    return TokenSequence(tuple(lemmatize(w) for w in words), "identifier")


def preprocess_identifiers(names) -> TokenSequence:
    """Concatenate the identifier sequences of several names, in order."""
    tokens = []
    for name in names:
        tokens.extend(preprocess_identifier(name).tokens)
    return TokenSequence(tuple(tokens), "identifier")
