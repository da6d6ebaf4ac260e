"""Mines identifiers from a JavaScript corpus: tokenization, occurrence and
role statistics, survey pair sampling, and 5-line context extraction.

The lexer is error-tolerant and heuristic by design: comments, string and
template literals, and regex literals are skipped; regex-vs-division is
decided from the previous significant token.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, SamplingError, ValidationError
from .embeddings import EmbeddingStore, vector_for
from .model import CodeContext, Identifier, IdentifierPair

log = logging.getLogger(__name__)

KEYWORDS = frozenset("""
    break case catch class const continue debugger default delete do else
    enum export extends finally for function if implements import in
    instanceof interface let new of package private protected public return
    static super switch this throw try typeof var void while with yield
    true false null
""".split())

_ID_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_ID_PART = _ID_START | frozenset("0123456789")

# Significant tokens after which a `/` starts a regex literal, not division.
_REGEX_PRECEDERS = frozenset(list("([{,;:=!&|?+-*%^~<>") + [
    "return", "typeof", "instanceof", "case", "in", "of", "new", "delete",
    "void", "throw", "do", "else", "=>",
])

ROLES = ("function", "variable", "property", "other")


@dataclass(frozen=True)
class Token:
    kind: str  # "identifier" | "keyword" | "punct" | "number"
    text: str
    line: int  # 0-based
    col: int   # 0-based


def tokenize_js(source: str) -> list[Token]:
    """Significant tokens of a JavaScript source; literals and comments are
    consumed silently (unterminated ones to end of line, templates to EOF)."""
    tokens: list[Token] = []
    i = 0
    line = 0
    col = 0
    n = len(source)

    def advance(count: int = 1):
        nonlocal i, line, col
        for _ in range(count):
            if i < n and source[i] == "\n":
                line += 1
                col = 0
            else:
                col += 1
            i += 1

    def skip_to_eol():
        while i < n and source[i] != "\n":
            advance()

    def prev_significant() -> str | None:
        return tokens[-1].text if tokens else None

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            skip_to_eol()
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            advance(2)
            while i < n and not (source[i] == "*" and i + 1 < n and source[i + 1] == "/"):
                advance()
            advance(2)
            continue
        if ch in "'\"":
            quote = ch
            advance()
            while i < n and source[i] != quote:
                if source[i] == "\n":  # unterminated: consume to end of line
                    break
                advance(2 if source[i] == "\\" else 1)
            if i < n and source[i] == quote:
                advance()
            continue
        if ch == "`":
            # Template literal skipped entirely, interpolations included.
            advance()
            while i < n and source[i] != "`":
                advance(2 if source[i] == "\\" else 1)
            advance()
            continue
        if ch == "/":
            prev = prev_significant()
            if prev is None or prev in _REGEX_PRECEDERS:
                advance()
                in_class = False
                while i < n and (in_class or source[i] != "/"):
                    if source[i] == "\n":  # unterminated regex
                        break
                    if source[i] == "\\":
                        advance(2)
                        continue
                    if source[i] == "[":
                        in_class = True
                    elif source[i] == "]":
                        in_class = False
                    advance()
                if i < n and source[i] == "/":
                    advance()
                    while i < n and source[i] in _ID_PART:
                        advance()  # flags
                continue
            tokens.append(Token("punct", "/", line, col))
            advance()
            continue
        if ch in _ID_START:
            start, tok_line, tok_col = i, line, col
            while i < n and source[i] in _ID_PART:
                advance()
            text = source[start:i]
            kind = "keyword" if text in KEYWORDS else "identifier"
            tokens.append(Token(kind, text, tok_line, tok_col))
            continue
        if ch.isdigit():
            start, tok_line, tok_col = i, line, col
            while i < n and (source[i] in _ID_PART or source[i] == "."):
                advance()
            tokens.append(Token("number", source[start:i], tok_line, tok_col))
            continue
        if ch == "=" and i + 1 < n and source[i + 1] == ">":
            tokens.append(Token("punct", "=>", line, col))
            advance(2)
            continue
        tokens.append(Token("punct", ch, line, col))
        advance()
    return tokens


def lex_identifiers(source: str) -> list[tuple[str, str, tuple[int, int]]]:
    """Identifier occurrences as (text, role, (line, col)).

    Roles, first match wins: function (followed by ``(`` or preceded by the
    ``function`` keyword), property (preceded by ``.`` or an object-literal
    key before ``:``), other (any remaining colon context such as labels or
    ternary branches), variable (``var``/``let``/``const`` binding or a bare
    reference).
    """
    tokens = tokenize_js(source)
    out = []
    for idx, token in enumerate(tokens):
        if token.kind != "identifier":
            continue
        prev = tokens[idx - 1].text if idx > 0 else None
        nxt = tokens[idx + 1].text if idx + 1 < len(tokens) else None
        if nxt == "(" or prev == "function":
            role = "function"
        elif prev == "." or (nxt == ":" and prev in ("{", ",")):
            role = "property"
        elif nxt == ":":
            role = "other"
        else:
            role = "variable"
        out.append((token.text, role, (token.line, token.col)))
    return out


# ── corpus statistics ────────────────────────────────────────────


@dataclass
class IdentifierStats:
    identifier: str
    count: int = 0
    role_counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(ROLES, 0))

    @property
    def primary_role(self) -> str:
        """Role holding a strict majority of occurrences, else "mixed"."""
        if self.count == 0:
            return "mixed"
        for role, n in self.role_counts.items():
            if 2 * n > self.count:
                return role
        return "mixed"


@dataclass
class CorpusStats:
    files_processed: int
    files_skipped: int
    total_occurrences: int
    counts: dict[str, int]
    bench_stats: dict[str, IdentifierStats]
    bench_occurrences: int
    coverage: float
    coverage_defined: bool

    @property
    def bench_count_min(self) -> int:
        return min((s.count for s in self.bench_stats.values()), default=0)

    @property
    def bench_count_max(self) -> int:
        return max((s.count for s in self.bench_stats.values()), default=0)

    @property
    def bench_count_mean(self) -> float:
        if not self.bench_stats:
            return 0.0
        return self.bench_occurrences / len(self.bench_stats)

    def role_distribution(self) -> dict[str, float]:
        """Fraction of benchmark identifiers primarily in each role."""
        dist = dict.fromkeys((*ROLES, "mixed"), 0)
        for stats in self.bench_stats.values():
            dist[stats.primary_role] += 1
        total = len(self.bench_stats)
        return {role: (n / total if total else 0.0) for role, n in dist.items()}

    def as_dict(self) -> dict:
        return {
            "files_processed": self.files_processed,
            "files_skipped": self.files_skipped,
            "total_occurrences": self.total_occurrences,
            "bench": {
                "identifiers": len(self.bench_stats),
                "occurrences": self.bench_occurrences,
                "coverage": self.coverage,
                "coverage_defined": self.coverage_defined,
                "count_min": self.bench_count_min,
                "count_mean": self.bench_count_mean,
                "count_max": self.bench_count_max,
                "role_distribution": self.role_distribution(),
            },
            "per_identifier": {
                name: {"count": s.count, "roles": s.role_counts, "primary_role": s.primary_role}
                for name, s in sorted(self.bench_stats.items())
            },
        }


def _iter_sources(files: Iterable) -> Iterable[tuple[str, str | None]]:
    """Yield (name, text) pairs; text is None when a path could not be read."""
    for item in files:
        if isinstance(item, tuple):
            yield item
            continue
        path = Path(item)
        try:
            yield str(path), path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("skipping unreadable file %s: %s", path, exc)
            yield str(path), None


def corpus_stats(files: Iterable, bench_identifiers: Iterable[str] = ()) -> CorpusStats:
    """Aggregate identifier occurrence and role statistics over a corpus.

    ``files`` may contain paths or (name, text) tuples; unreadable paths are
    skipped and tallied. Coverage is the fraction of all identifier
    occurrences accounted for by the benchmark identifiers.
    """
    bench = set(bench_identifiers)
    counts: dict[str, int] = {}
    roles: dict[str, dict[str, int]] = {}
    processed = 0
    skipped = 0
    for _name, text in _iter_sources(files):
        if text is None:
            skipped += 1
            continue
        processed += 1
        for ident, role, _pos in lex_identifiers(text):
            counts[ident] = counts.get(ident, 0) + 1
            if ident in bench:
                role_counts = roles.setdefault(ident, dict.fromkeys(ROLES, 0))
                role_counts[role] += 1

    total = sum(counts.values())
    bench_stats = {
        name: IdentifierStats(
            identifier=name,
            count=counts.get(name, 0),
            role_counts=roles.get(name, dict.fromkeys(ROLES, 0)),
        )
        for name in sorted(bench)
    }
    bench_occurrences = sum(s.count for s in bench_stats.values())
    coverage_defined = total > 0
    return CorpusStats(
        files_processed=processed,
        files_skipped=skipped,
        total_occurrences=total,
        counts=counts,
        bench_stats=bench_stats,
        bench_occurrences=bench_occurrences,
        coverage=(bench_occurrences / total) if coverage_defined else 0.0,
        coverage_defined=coverage_defined,
    )


def identifier_token_lines(files: Iterable) -> list[list[str]]:
    """Identifier token sequence per file, in source order (trainer corpus)."""
    lines = []
    for _name, text in _iter_sources(files):
        if text is None:
            continue
        lines.append([ident for ident, _role, _pos in lex_identifiers(text)])
    return lines


# ── survey pair sampling ─────────────────────────────────────────


@dataclass(frozen=True)
class Band:
    low: float
    high: float
    quota: int

    def __post_init__(self):
        if not -1.0 <= self.low <= self.high <= 1.0:
            raise ConfigError(f"band [{self.low},{self.high}] outside [-1,1]")
        if self.quota < 0:
            raise ConfigError(f"negative quota {self.quota}")


@dataclass
class SamplingConfig:
    min_count: int = 50
    bands: list[Band] = field(default_factory=list)
    manual_pairs: list[IdentifierPair] = field(default_factory=list)
    random_pairs: int = 0
    seed: int = 0

    def __post_init__(self):
        ordered = sorted(self.bands, key=lambda b: b.low)
        for first, second in zip(ordered, ordered[1:]):
            if second.low < first.high:
                raise ConfigError(
                    f"bands [{first.low},{first.high}] and [{second.low},{second.high}] overlap")


def sample_pairs(counts: Mapping[str, int], store: EmbeddingStore,
                 cfg: SamplingConfig) -> list[IdentifierPair]:
    """Sample survey candidate pairs: per-band quotas over all cosine-ranked
    pairs of frequent identifiers, plus manual and uniformly random pairs."""
    candidates = sorted(
        name for name, count in counts.items()
        if count > cfg.min_count and _resolvable(store, name)
    )
    if len(candidates) < 2:
        if cfg.bands or cfg.random_pairs:
            raise SamplingError("fewer than two frequent identifiers resolvable in the store")
        sims = np.zeros((0, 0))
    else:
        vectors = np.array([vector_for(store, name) for name in candidates], dtype=np.float64)
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        sims = (vectors / norms) @ (vectors / norms).T

    all_pairs: list[tuple[int, int]] = [
        (i, j) for i in range(len(candidates)) for j in range(i + 1, len(candidates))
    ]
    rng = random.Random(cfg.seed)

    chosen: list[tuple[str, str]] = []
    for band in cfg.bands:
        eligible = [(i, j) for i, j in all_pairs if band.low <= sims[i, j] <= band.high]
        if len(eligible) < band.quota:
            raise SamplingError(
                f"band [{band.low},{band.high}] has {len(eligible)} pairs, quota {band.quota}")
        chosen.extend((candidates[i], candidates[j]) for i, j in rng.sample(eligible, band.quota))

    chosen.extend((p.id1.text, p.id2.text) for p in cfg.manual_pairs)

    if cfg.random_pairs:
        if len(all_pairs) < cfg.random_pairs:
            raise SamplingError(
                f"{cfg.random_pairs} random pairs requested, only {len(all_pairs)} exist")
        chosen.extend(
            (candidates[i], candidates[j]) for i, j in rng.sample(all_pairs, cfg.random_pairs))

    result: list[IdentifierPair] = []
    seen: set[str] = set()
    for id1, id2 in chosen:
        pair = IdentifierPair(Identifier(id1), Identifier(id2))
        if pair.pair_id not in seen:
            seen.add(pair.pair_id)
            result.append(pair)
    return result


def _resolvable(store: EmbeddingStore, token: str) -> bool:
    try:
        vector_for(store, token)
        return True
    except Exception:
        return False


# ── context extraction ───────────────────────────────────────────


def extract_contexts(files: Iterable, identifier: str, n_contexts: int = 5,
                     seed: int = 0) -> list[CodeContext]:
    """Sample 5-line contexts around occurrences of ``identifier``.

    The window is two lines above and below the occurrence, shifted at file
    edges and padded with empty lines for files shorter than five lines.
    Every occurrence of the identifier inside the window becomes a blank slot.
    """
    if not identifier:
        raise ValidationError("empty identifier")
    contexts: list[CodeContext] = []
    seen_windows: set[tuple[str, int]] = set()
    for name, text in _iter_sources(files):
        if text is None:
            continue
        occurrences = [pos for ident, _role, pos in lex_identifiers(text) if ident == identifier]
        if not occurrences:
            continue
        lines = text.split("\n")
        for occ_line, _occ_col in occurrences:
            start = min(max(0, occ_line - 2), max(0, len(lines) - 5))
            if (name, start) in seen_windows:
                continue
            seen_windows.add((name, start))
            window = lines[start:start + 5]
            window += [""] * (5 - len(window))
            slots = tuple(
                (line - start, col, len(identifier))
                for line, col in occurrences
                if start <= line < start + 5
            )
            contexts.append(CodeContext(
                owner=Identifier(identifier),
                lines=tuple(window),
                blank_slots=slots,
            ))

    if len(contexts) < n_contexts:
        log.warning("identifier %r has only %d context(s), %d requested",
                    identifier, len(contexts), n_contexts)
        return contexts
    rng = random.Random(seed)
    return rng.sample(contexts, n_contexts)
