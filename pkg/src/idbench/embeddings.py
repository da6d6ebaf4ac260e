"""Token vector store: loading/saving, cosine similarity, subword composition,
nearest-neighbor queries, and per-pair scoring."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import OutOfVocabularyError, ParseError, UndefinedSimilarityError, ValidationError
from .model import IdentifierPair


def char_ngrams(token: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of ``<token>`` with boundary markers, sizes min_n..max_n."""
    marked = f"<{token}>"
    grams = []
    for n in range(min_n, max_n + 1):
        for i in range(0, len(marked) - n + 1):
            grams.append(marked[i:i + n])
    return grams


@dataclass
class EmbeddingStore:
    """Immutable-after-construction map from tokens (and optionally character
    n-grams) to dense vectors of a fixed dimension."""

    dim: int
    word_vectors: dict[str, np.ndarray]
    ngram_vectors: dict[str, np.ndarray] | None = None
    ngram_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.dim}")
        if (self.ngram_vectors is None) != (self.ngram_range is None):
            raise ValidationError("ngram_vectors and ngram_range must be set together")
        if self.ngram_range is not None:
            min_n, max_n = self.ngram_range
            if not 1 <= min_n <= max_n:
                raise ValidationError(f"invalid ngram range {self.ngram_range}")

    def __contains__(self, token: str) -> bool:
        return token in self.word_vectors

    def tokens(self) -> list[str]:
        return list(self.word_vectors)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValidationError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise UndefinedSimilarityError("cosine of a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


def vector_for(store: EmbeddingStore, token: str) -> np.ndarray:
    """Vector for a token: stored directly, or composed as the sum of its
    known character n-grams when the store carries subword entries."""
    if not token:
        raise ValidationError("empty token")
    direct = store.word_vectors.get(token)
    if direct is not None:
        return direct
    if store.ngram_vectors is not None:
        min_n, max_n = store.ngram_range
        parts = [store.ngram_vectors[g] for g in char_ngrams(token, min_n, max_n)
                 if g in store.ngram_vectors]
        if parts:
            return np.sum(parts, axis=0)
    raise OutOfVocabularyError(f"token {token!r} is out of vocabulary")


def nearest_neighbors(store: EmbeddingStore, token: str, k: int) -> list[tuple[str, float]]:
    """Top-k tokens by cosine to ``token`` (itself excluded), ties broken
    lexicographically."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > len(store.word_vectors) - (1 if token in store.word_vectors else 0):
        raise ValidationError(f"k={k} exceeds available vocabulary")
    query = vector_for(store, token)
    scored = [
        (other, cosine(query, vec))
        for other, vec in store.word_vectors.items()
        if other != token
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def score_pairs(store: EmbeddingStore,
                pairs: Sequence[IdentifierPair]) -> dict[str, float | None]:
    """Cosine per pair; pairs with an unresolvable side are recorded as missing."""
    scores: dict[str, float | None] = {}
    for pair in pairs:
        try:
            scores[pair.pair_id] = cosine(
                vector_for(store, pair.id1.text),
                vector_for(store, pair.id2.text),
            )
        except OutOfVocabularyError:
            scores[pair.pair_id] = None
    return scores


# ── word2vec-style text format ───────────────────────────────────


def load_vectors(stream: IO[str] | Iterable[str]) -> EmbeddingStore:
    """Load vectors from the text format: header ``V D`` then V lines of
    ``token f1 .. fD``."""
    lines = iter(enumerate(stream, start=1))
    try:
        _, header = next(lines)
    except StopIteration:
        raise ParseError("empty vector file", 1) from None
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"expected header 'V D', got {header.strip()!r}", 1)
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"non-integer header fields {header.strip()!r}", 1) from None

    vectors: dict[str, np.ndarray] = {}
    for lineno, raw in lines:
        row = raw.rstrip("\n")
        if not row:
            continue
        fields = row.split(" ")
        if len(fields) != dim + 1:
            raise ParseError(f"expected {dim} components, got {len(fields) - 1}", lineno)
        token = fields[0]
        if token in vectors:
            raise ValidationError(f"line {lineno}: duplicate token {token!r}")
        try:
            vectors[token] = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric vector component", lineno) from None

    if len(vectors) != count:
        raise ParseError(f"header declares {count} tokens, file has {len(vectors)}")
    return EmbeddingStore(dim=dim, word_vectors=vectors)


def save_vectors(store: EmbeddingStore, stream: IO[str]) -> None:
    """Write word vectors in the text format (subword entries are not saved)."""
    stream.write(f"{len(store.word_vectors)} {store.dim}\n")
    for token, vec in store.word_vectors.items():
        components = " ".join(f"{x:.6f}" for x in vec)
        stream.write(f"{token} {components}\n")
