"""Local document corpus with ranked search and article retrieval."""

from deepqna.corpus.index import (
    CorpusError,
    CorpusIndex,
    DuplicateId,
    DuplicateTitle,
    NotFound,
    build_index,
    edit_distance,
    tokenize,
)
from deepqna.corpus.store import load_corpus, save_corpus

__all__ = [
    "CorpusError",
    "CorpusIndex",
    "DuplicateId",
    "DuplicateTitle",
    "NotFound",
    "build_index",
    "edit_distance",
    "load_corpus",
    "save_corpus",
    "tokenize",
]
