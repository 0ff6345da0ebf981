"""Stage-1 candidate generation: a TF-IDF index over abstracts with exact top-k.

Weighting: raw term counts, smoothed idf = ln((1 + N) / (1 + df)) + 1, vectors
L2-normalized, similarity = dot product (cosine). Query terms missing from the
index vocabulary are dropped. Ties in ranking break by ascending doc_id, so
results are fully deterministic.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus, DataError
from .tokenization import tokenize

INDEX_FORMAT_VERSION = 1

FIELDS_TITLE = "title"
FIELDS_TITLE_ABSTRACT = "title+abstract"
_VALID_FIELDS = (FIELDS_TITLE, FIELDS_TITLE_ABSTRACT)


@dataclass(frozen=True)
class RankedAbstract:
    doc_id: int
    score: float


class TfIdfIndex:
    """Immutable sparse TF-IDF index; queries are pure functions of the index."""

    def __init__(
        self,
        vocabulary: dict[str, int],
        document_frequency: list[int],
        doc_vectors: dict[int, dict[int, float]],
        fields: str = FIELDS_TITLE_ABSTRACT,
    ):
        self.vocabulary = vocabulary
        self.document_frequency = document_frequency
        self.doc_vectors = doc_vectors
        self.fields = fields
        self.doc_count = len(doc_vectors)
        self.idf = [
            math.log((1.0 + self.doc_count) / (1.0 + df)) + 1.0 for df in document_frequency
        ]
        # Postings over normalized doc weights, for sparse dot products.
        self._postings: dict[int, list[tuple[int, float]]] = {}
        for doc_id, vector in doc_vectors.items():
            for term_id, weight in vector.items():
                self._postings.setdefault(term_id, []).append((doc_id, weight))

    def query_vector(self, text: str) -> dict[int, float]:
        """L2-normalized TF-IDF vector of arbitrary text, using the index's idf table."""
        counts = Counter(tokenize(text))
        vector: dict[int, float] = {}
        for term, tf in counts.items():
            term_id = self.vocabulary.get(term)
            if term_id is None:
                continue
            vector[term_id] = tf * self.idf[term_id]
        return _normalize(vector)


def _doc_text(doc, fields: str) -> str:
    if fields == FIELDS_TITLE:
        return doc.title
    return " ".join((doc.title, *doc.sentences))


def _normalize(vector: dict[int, float]) -> dict[int, float]:
    norm = math.sqrt(sum(w * w for w in vector.values()))
    if norm == 0.0:
        return {}
    return {term_id: w / norm for term_id, w in vector.items()}


def build_index(corpus: Corpus, fields: str = FIELDS_TITLE_ABSTRACT) -> TfIdfIndex:
    """Index every abstract in corpus order; deterministic for a given corpus."""
    if fields not in _VALID_FIELDS:
        raise DataError(f"fields must be one of {_VALID_FIELDS}, got {fields!r}")
    if len(corpus) == 0:
        raise DataError("cannot index an empty corpus")

    vocabulary: dict[str, int] = {}
    doc_counts: list[tuple[int, Counter]] = []
    for doc in corpus:
        counts = Counter(tokenize(_doc_text(doc, fields)))
        for term in counts:
            if term not in vocabulary:
                vocabulary[term] = len(vocabulary)
        doc_counts.append((doc.doc_id, counts))

    document_frequency = [0] * len(vocabulary)
    for _, counts in doc_counts:
        for term in counts:
            document_frequency[vocabulary[term]] += 1

    n_docs = len(doc_counts)
    idf = [math.log((1.0 + n_docs) / (1.0 + df)) + 1.0 for df in document_frequency]
    doc_vectors: dict[int, dict[int, float]] = {}
    for doc_id, counts in doc_counts:
        vector = {vocabulary[t]: tf * idf[vocabulary[t]] for t, tf in counts.items()}
        doc_vectors[doc_id] = _normalize(vector)

    return TfIdfIndex(vocabulary, document_frequency, doc_vectors, fields)


def top_k(index: TfIdfIndex, claim_text: str, k: int = 30) -> list[RankedAbstract]:
    """The min(k, doc_count) most similar abstracts, sorted by (score desc, doc_id asc)."""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    query = index.query_vector(claim_text)
    scores = {doc_id: 0.0 for doc_id in index.doc_vectors}
    for term_id, weight in query.items():
        for doc_id, doc_weight in index._postings.get(term_id, ()):
            scores[doc_id] += weight * doc_weight
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [
        RankedAbstract(doc_id=doc_id, score=min(1.0, max(0.0, score)))
        for doc_id, score in ranked[: min(k, index.doc_count)]
    ]


def save_index(index: TfIdfIndex, path: str | Path) -> None:
    payload = {
        "format_version": INDEX_FORMAT_VERSION,
        "fields": index.fields,
        "vocabulary": index.vocabulary,
        "document_frequency": index.document_frequency,
        "doc_vectors": {
            str(doc_id): {str(t): w for t, w in vector.items()}
            for doc_id, vector in index.doc_vectors.items()
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")


def load_index(path: str | Path) -> TfIdfIndex:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    version = payload.get("format_version")
    if version != INDEX_FORMAT_VERSION:
        raise DataError(f"unsupported index format_version {version!r}")
    doc_vectors = {
        int(doc_id): {int(t): float(w) for t, w in vector.items()}
        for doc_id, vector in payload["doc_vectors"].items()
    }
    return TfIdfIndex(
        vocabulary=payload["vocabulary"],
        document_frequency=payload["document_frequency"],
        doc_vectors=doc_vectors,
        fields=payload["fields"],
    )
