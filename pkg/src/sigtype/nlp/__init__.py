from sigtype.nlp.preprocess import (
    TokenSequence,
    lemma_table,
    lemmatize,
    normalize_text,
    preprocess_comment,
    preprocess_identifier,
    preprocess_identifiers,
    resource_hashes,
    split_identifier,
    stopwords,
)

__all__ = [
    "TokenSequence",
    "lemma_table",
    "lemmatize",
    "normalize_text",
    "preprocess_comment",
    "preprocess_identifier",
    "preprocess_identifiers",
    "resource_hashes",
    "split_identifier",
    "stopwords",
]
