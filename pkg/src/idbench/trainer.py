"""Desk-scale CBOW/skip-gram trainer with negative sampling and optional
FastText-style character n-gram inputs.

Single-threaded and deterministic for a fixed seed: same seed, same config,
same corpus gives bit-identical stores.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ValidationError
from .embeddings import EmbeddingStore, char_ngrams

NOISE_EXPONENT = 0.75
LR_FLOOR_FRACTION = 1e-4


@dataclass(frozen=True)
class TrainConfig:
    mode: str = "cbow"  # "cbow" | "sg"
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_count: int = 5
    subword: tuple[int, int] | None = None
    seed: int = 1

    def __post_init__(self):
        if self.mode not in ("cbow", "sg"):
            raise ConfigError(f"mode must be 'cbow' or 'sg', got {self.mode!r}")
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ConfigError("dim, window, negatives, and epochs must all be >= 1")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.subword is not None:
            min_n, max_n = self.subword
            if not 1 <= min_n <= max_n:
                raise ConfigError(f"invalid subword range {self.subword}")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def logistic_step(h: np.ndarray, out_rows: np.ndarray,
                  labels: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss and gradients for one negative-sampling step.

    ``h`` is the input representation, ``out_rows`` the stacked output vectors
    of the positive and negative targets, ``labels`` their 1/0 labels. Returns
    (total loss, gradient wrt h, gradient wrt out_rows).
    """
    logits = out_rows @ h
    loss = float(np.logaddexp(0.0, (1.0 - 2.0 * labels) * logits).sum())
    err = _sigmoid(logits) - labels
    grad_h = err @ out_rows
    grad_out = err[:, None] * h[None, :]
    return loss, grad_h, grad_out


class Trainer:
    """Holds the model state during training; most callers use :func:`train`."""

    def __init__(self, sentences: Sequence[Sequence[str]], cfg: TrainConfig):
        self.cfg = cfg
        counts: dict[str, int] = {}
        for sentence in sentences:
            for token in sentence:
                counts[token] = counts.get(token, 0) + 1
        vocab = sorted(
            (t for t, c in counts.items() if c >= cfg.min_count),
            key=lambda t: (-counts[t], t),
        )
        if not vocab:
            raise ConfigError("vocabulary is empty after min_count filtering")
        self.vocab = vocab
        self.index = {t: i for i, t in enumerate(vocab)}

        # Token streams with out-of-vocabulary tokens dropped before windowing.
        self.sentences = [
            np.array([self.index[t] for t in s if t in self.index], dtype=np.int64)
            for s in sentences
        ]
        self.sentences = [s for s in self.sentences if len(s) > 0]
        self.total_positions = sum(len(s) for s in self.sentences)

        freq = np.array([counts[t] for t in vocab], dtype=np.float64) ** NOISE_EXPONENT
        self._noise_cdf = np.cumsum(freq / freq.sum())

        # Input rows: one per word, then one per n-gram in subword mode. A
        # word's representation is the sum of its constituent rows.
        n_words = len(vocab)
        if cfg.subword is not None:
            min_n, max_n = cfg.subword
            grams = sorted({g for t in vocab for g in char_ngrams(t, min_n, max_n)})
            self.grams = grams
            gram_index = {g: n_words + i for i, g in enumerate(grams)}
            self.constituents = [
                np.array([i] + [gram_index[g] for g in char_ngrams(t, min_n, max_n)],
                         dtype=np.int64)
                for i, t in enumerate(vocab)
            ]
            n_rows = n_words + len(grams)
        else:
            self.grams = []
            self.constituents = [np.array([i], dtype=np.int64) for i in range(n_words)]
            n_rows = n_words

        self.rng = np.random.Generator(np.random.PCG64(cfg.seed))
        bound = 0.5 / cfg.dim
        self.w_in = self.rng.uniform(-bound, bound, size=(n_rows, cfg.dim))
        self.w_out = np.zeros((n_words, cfg.dim))
        self._processed = 0

    # ── representations ─────────────────────────────────────────

    def input_rep(self, word: int) -> np.ndarray:
        return self.w_in[self.constituents[word]].sum(axis=0)

    def _sample_negatives(self, count: int) -> np.ndarray:
        return np.searchsorted(self._noise_cdf, self.rng.random(count))

    def _learning_rate(self) -> float:
        total = self.total_positions * self.cfg.epochs
        remaining = 1.0 - self._processed / total
        return self.cfg.learning_rate * max(LR_FLOOR_FRACTION, remaining)

    # ── training ────────────────────────────────────────────────

    def train(self) -> None:
        for _ in range(self.cfg.epochs):
            for sentence in self.sentences:
                self._train_sentence(sentence)

    def _train_sentence(self, sentence: np.ndarray) -> None:
        window = self.cfg.window
        k = self.cfg.negatives
        for t in range(len(sentence)):
            lr = self._learning_rate()
            self._processed += 1
            lo = max(0, t - window)
            context = np.concatenate([sentence[lo:t], sentence[t + 1:t + window + 1]])
            if len(context) == 0:
                continue
            if self.cfg.mode == "sg":
                self._step_sg(int(sentence[t]), context, k, lr)
            else:
                self._step_cbow(int(sentence[t]), context, k, lr)

    def _step_sg(self, center: int, context: np.ndarray, k: int, lr: float) -> None:
        cons = self.constituents[center]
        h = self.w_in[cons].sum(axis=0)
        n_ctx = len(context)
        rows = np.empty((n_ctx, 1 + k), dtype=np.int64)
        rows[:, 0] = context
        rows[:, 1:] = self._sample_negatives(n_ctx * k).reshape(n_ctx, k)
        labels = np.zeros((n_ctx, 1 + k))
        labels[:, 0] = 1.0
        # A sampled negative that hits the positive target is dropped.
        valid = np.ones_like(labels, dtype=bool)
        valid[:, 1:] = rows[:, 1:] != context[:, None]
        flat_rows = rows[valid]
        flat_labels = labels[valid]

        _, grad_h, grad_out = logistic_step(h, self.w_out[flat_rows], flat_labels)
        np.add.at(self.w_out, flat_rows, -lr * grad_out)
        self.w_in[cons] -= lr * grad_h

    def _step_cbow(self, center: int, context: np.ndarray, k: int, lr: float) -> None:
        ctx_cons = np.concatenate([self.constituents[int(w)] for w in context])
        h = self.w_in[ctx_cons].sum(axis=0) / len(context)
        rows = np.empty(1 + k, dtype=np.int64)
        rows[0] = center
        rows[1:] = self._sample_negatives(k)
        labels = np.zeros(1 + k)
        labels[0] = 1.0
        valid = np.ones(1 + k, dtype=bool)
        valid[1:] = rows[1:] != center
        flat_rows = rows[valid]

        _, grad_h, grad_out = logistic_step(h, self.w_out[flat_rows], labels[valid])
        np.add.at(self.w_out, flat_rows, -lr * grad_out)
        np.add.at(self.w_in, ctx_cons, -lr * grad_h / len(context))

    # ── evaluation ──────────────────────────────────────────────

    def make_validation_batch(self, size: int, seed: int) -> list[tuple]:
        """A frozen sample of (center, context, negatives) positions for
        loss tracking; independent of the training RNG."""
        rng = np.random.Generator(np.random.PCG64(seed))
        window = self.cfg.window
        k = self.cfg.negatives
        batch = []
        flat: list[tuple[int, int]] = [
            (si, t) for si, s in enumerate(self.sentences) for t in range(len(s))
        ]
        picks = rng.choice(len(flat), size=min(size, len(flat)), replace=False)
        for pick in sorted(picks):
            si, t = flat[pick]
            sentence = self.sentences[si]
            lo = max(0, t - window)
            context = np.concatenate([sentence[lo:t], sentence[t + 1:t + window + 1]])
            if len(context) == 0:
                continue
            negatives = np.searchsorted(self._noise_cdf, rng.random(len(context) * k)) \
                if self.cfg.mode == "sg" else np.searchsorted(self._noise_cdf, rng.random(k))
            batch.append((int(sentence[t]), context.copy(), negatives))
        return batch

    def validation_loss(self, batch: list[tuple]) -> float:
        """Mean negative log-likelihood per positive pair over a frozen batch."""
        total = 0.0
        pairs = 0
        k = self.cfg.negatives
        for center, context, negatives in batch:
            if self.cfg.mode == "sg":
                h = self.input_rep(center)
                rows = np.empty((len(context), 1 + k), dtype=np.int64)
                rows[:, 0] = context
                rows[:, 1:] = negatives.reshape(len(context), k)
                labels = np.zeros((len(context), 1 + k))
                labels[:, 0] = 1.0
                loss, _, _ = logistic_step(h, self.w_out[rows.ravel()], labels.ravel())
                pairs += len(context)
            else:
                ctx_cons = np.concatenate([self.constituents[int(w)] for w in context])
                h = self.w_in[ctx_cons].sum(axis=0) / len(context)
                rows = np.concatenate([[center], negatives]).astype(np.int64)
                labels = np.zeros(1 + k)
                labels[0] = 1.0
                loss, _, _ = logistic_step(h, self.w_out[rows], labels)
                pairs += 1
            total += loss
        if pairs == 0:
            raise ValidationError("empty validation batch")
        return total / pairs

    # ── export ──────────────────────────────────────────────────

    def to_store(self) -> EmbeddingStore:
        """Freeze the model into an EmbeddingStore; word vectors are the
        composed input representations."""
        word_vectors = {t: self.input_rep(i).copy() for i, t in enumerate(self.vocab)}
        if self.cfg.subword is not None:
            n_words = len(self.vocab)
            ngram_vectors = {
                g: self.w_in[n_words + i].copy() for i, g in enumerate(self.grams)
            }
            return EmbeddingStore(
                dim=self.cfg.dim,
                word_vectors=word_vectors,
                ngram_vectors=ngram_vectors,
                ngram_range=self.cfg.subword,
            )
        return EmbeddingStore(dim=self.cfg.dim, word_vectors=word_vectors)


def train(corpus: Iterable[Sequence[str]], cfg: TrainConfig) -> EmbeddingStore:
    """Train embeddings on a corpus of token sequences."""
    trainer = Trainer(list(corpus), cfg)
    trainer.train()
    return trainer.to_store()


def read_token_file(path: str) -> list[list[str]]:
    """One whitespace-separated token sequence per line; blank lines skipped."""
    sentences = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            tokens = line.split()
            if tokens:
                sentences.append(tokens)
    return sentences
