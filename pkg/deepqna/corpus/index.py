"""Lexical corpus index with ranked search and exact-title retrieval."""

import logging
import math
import re
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from rank_bm25 import BM25Okapi

from deepqna.models.document import Document

logger = logging.getLogger(__name__)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
DEFAULT_TITLE_WEIGHT = 2
DEFAULT_TOP_K = 5
SNIPPET_CHARS = 300
SUGGESTIONS = 3


class CorpusError(Exception):
    """Base class for corpus errors."""


class DuplicateId(CorpusError):
    """Two documents share an id."""

    def __init__(self, doc_id: str):
        super().__init__(f"Duplicate document id: {doc_id}")
        self.doc_id = doc_id


class DuplicateTitle(CorpusError):
    """Two documents share a title."""

    def __init__(self, title: str):
        super().__init__(f"Duplicate document title: {title}")
        self.title = title


class NotFound(CorpusError):
    """No document has the requested title."""

    def __init__(self, title: str, suggestions: Sequence[str]):
        self.title = title
        self.suggestions = list(suggestions)
        message = f"No article titled '{title}'"
        if self.suggestions:
            message += ". Closest titles: " + ", ".join(self.suggestions)
        super().__init__(message)


def tokenize(text: str) -> List[str]:
    """Lowercase and split on non-alphanumerics."""
    return re.findall(r"[a-z0-9]+", text.lower())


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance."""
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


class PositiveIdfBM25(BM25Okapi):
    """Okapi BM25 with idf = ln(1 + (N - n + 0.5) / (n + 0.5)), positive for every term."""

    def _calc_idf(self, nd: Dict[str, int]) -> None:
        for word, freq in nd.items():
            self.idf[word] = math.log(1 + (self.corpus_size - freq + 0.5) / (freq + 0.5))


class CorpusIndex:
    """
    Immutable BM25 index over a document list.

    Titles are indexed `title_weight` times. Ranking ties are broken by
    document id so results are deterministic.
    """

    def __init__(
        self,
        documents: Sequence[Document],
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
        title_weight: int = DEFAULT_TITLE_WEIGHT,
    ):
        self.documents: Tuple[Document, ...] = tuple(documents)
        self.k1 = k1
        self.b = b
        self.title_weight = title_weight
        self._by_id: Dict[str, int] = {}
        self._by_title: Dict[str, int] = {}
        for position, doc in enumerate(self.documents):
            if doc.id in self._by_id:
                raise DuplicateId(doc.id)
            if doc.title in self._by_title:
                raise DuplicateTitle(doc.title)
            self._by_id[doc.id] = position
            self._by_title[doc.title] = position

        self.tokens: Tuple[Tuple[str, ...], ...] = tuple(
            tuple(tokenize(doc.title) * title_weight + tokenize(doc.body)) for doc in self.documents
        )
        self._postings: Dict[str, List[int]] = {}
        for position, terms in enumerate(self.tokens):
            for term in dict.fromkeys(terms):
                self._postings.setdefault(term, []).append(position)
        self._bm25: Optional[PositiveIdfBM25] = (
            PositiveIdfBM25([list(t) for t in self.tokens], k1=k1, b=b) if self.documents else None
        )

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def titles(self) -> List[str]:
        return [doc.title for doc in self.documents]

    def get(self, doc_id: str) -> Optional[Document]:
        position = self._by_id.get(doc_id)
        return None if position is None else self.documents[position]

    def postings(self, term: str) -> List[Tuple[str, int]]:
        """(document id, term frequency) pairs for a term."""
        return [
            (self.documents[p].id, self.tokens[p].count(term)) for p in self._postings.get(term.lower(), [])
        ]

    def scores(self, query: str) -> List[float]:
        """Ranking score of every document for a query, in corpus order."""
        if self._bm25 is None:
            return []
        return [float(s) for s in self._bm25.get_scores(tokenize(query))]

    def search(self, query: str, k: int = DEFAULT_TOP_K) -> List[Tuple[Document, float]]:
        """
        Rank documents for a query.

        Only documents containing at least one query term are candidates.

        Args:
            query: Free-text query
            k: Maximum number of hits

        Returns:
            Up to k (document, score) pairs, best first

        Raises:
            ValueError: If k < 1
        """
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        terms = tokenize(query)
        candidates = sorted({p for term in terms for p in self._postings.get(term, [])})
        if not candidates:
            return []
        scores = self.scores(query)
        ranked = sorted(candidates, key=lambda p: (-scores[p], self.documents[p].id))
        return [(self.documents[p], scores[p]) for p in ranked[:k]]

    def render_hits(self, hits: Iterable[Tuple[Document, float]], snippet_chars: int = SNIPPET_CHARS) -> str:
        """Numbered hit list for an observation."""
        blocks = [f"({rank}) {doc.title}\n{doc.body[:snippet_chars]}" for rank, (doc, _) in enumerate(hits, start=1)]
        return "\n\n".join(blocks) if blocks else "No results."

    def retrieve_article(self, title: str) -> Document:
        """
        Document with exactly this title.

        Raises:
            NotFound: With the closest titles by edit distance
        """
        position = self._by_title.get(title)
        if position is not None:
            return self.documents[position]
        closest = sorted(self._by_title, key=lambda t: (edit_distance(title, t), t))[:SUGGESTIONS]
        raise NotFound(title, closest)


def build_index(
    documents: Sequence[Document],
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
    title_weight: int = DEFAULT_TITLE_WEIGHT,
) -> CorpusIndex:
    """
    Build an index.

    Raises:
        DuplicateId: If two documents share an id
        DuplicateTitle: If two documents share a title
    """
    index = CorpusIndex(documents, k1=k1, b=b, title_weight=title_weight)
    logger.info(f"Indexed {len(index)} documents")
    return index
