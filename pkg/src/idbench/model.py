"""Core data types and the flat-file formats shared by all idbench tools.

File formats (all UTF-8, ``\\n`` line endings):

* benchmark CSV: header ``id1,id2,relatedness,similarity,contextual_similarity``;
  the contextual column may be empty.
* direct ratings CSV: ``participant,pair_id,id1,id2,relatedness,similarity``.
* indirect ratings CSV: ``participant,pair_id,id1,id2,context_owner,chosen``
  where owner/chosen are the literal tokens ``id1``/``id2``.
* contexts JSONL: ``{"owner": str, "lines": [str x5], "blanks": [[line,col,len], ...]}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import ParseError, ValidationError

# JavaScript identifier grammar, ASCII form (no Unicode escapes).
_IDENTIFIER_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")

SCORE_DECIMALS = 6
SCORE_TOLERANCE = 1e-6

BENCHMARK_HEADER = "id1,id2,relatedness,similarity,contextual_similarity"
DIRECT_HEADER = "participant,pair_id,id1,id2,relatedness,similarity"
INDIRECT_HEADER = "participant,pair_id,id1,id2,context_owner,chosen"

# (variant, tau, theta) triples of the published benchmark configurations.
STANDARD_VARIANTS = {
    "small": (0.215, 0.4),
    "medium": (0.23, 0.5),
    "large": (0.25, 0.6),
}


@dataclass(frozen=True)
class Identifier:
    """A source-code identifier name."""

    text: str

    def __post_init__(self):
        if not _IDENTIFIER_RE.fullmatch(self.text):
            raise ValidationError(f"not a valid identifier: {self.text!r}")

    def __str__(self) -> str:
        return self.text


def canonical_pair_id(id1: str, id2: str) -> str:
    """Deterministic pair key: both texts joined by ``|``, lexicographically first one first."""
    a, b = sorted((id1, id2))
    return f"{a}|{b}"


@dataclass(frozen=True)
class IdentifierPair:
    id1: Identifier
    id2: Identifier
    pair_id: str = ""

    def __post_init__(self):
        if self.id1.text == self.id2.text:
            raise ValidationError(f"pair of identical identifiers: {self.id1.text!r}")
        if not self.pair_id:
            object.__setattr__(self, "pair_id", canonical_pair_id(self.id1.text, self.id2.text))


@dataclass(frozen=True)
class DirectRating:
    """One participant's Likert answers for one pair (relatedness and similarity, 1-5)."""

    participant: str
    pair_id: str
    relatedness: int
    similarity: int

    def __post_init__(self):
        for name in ("relatedness", "similarity"):
            value = getattr(self, name)
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise ValidationError(f"{name} rating must be an integer in 1..5, got {value!r}")


@dataclass(frozen=True)
class IndirectRating:
    """One forced-choice answer: which pair member best fits a shown code context."""

    participant: str
    pair_id: str
    context_owner: str  # "id1" or "id2"
    chosen: str  # "id1" or "id2"

    def __post_init__(self):
        for name in ("context_owner", "chosen"):
            value = getattr(self, name)
            if value not in ("id1", "id2"):
                raise ValidationError(f"{name} must be 'id1' or 'id2', got {value!r}")


def _check_unit_score(name: str, value: float | None) -> None:
    if value is not None and not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} score {value} outside [0,1]")


@dataclass(frozen=True)
class GoldScore:
    """Gold-standard scores for one pair; contextual similarity is absent for
    pairs dropped from the contextual task."""

    pair: IdentifierPair
    relatedness: float
    similarity: float
    contextual_similarity: float | None = None

    def __post_init__(self):
        _check_unit_score("relatedness", self.relatedness)
        _check_unit_score("similarity", self.similarity)
        _check_unit_score("contextual_similarity", self.contextual_similarity)


@dataclass
class Benchmark:
    """A named benchmark variant: scored pairs plus the thresholds that produced it."""

    variant: str
    tau: float
    theta: float
    scores: list[GoldScore] = field(default_factory=list)

    def __post_init__(self):
        seen: set[str] = set()
        for gold in self.scores:
            if gold.pair.pair_id in seen:
                raise ValidationError(f"duplicate pair in benchmark: {gold.pair.pair_id}")
            seen.add(gold.pair.pair_id)

    def pair_ids(self) -> set[str]:
        return {gold.pair.pair_id for gold in self.scores}

    def gold_for_task(self, task: str) -> dict[str, float]:
        """Map pair_id -> gold score for one of relatedness|similarity|contextual."""
        if task not in ("relatedness", "similarity", "contextual"):
            raise ValidationError(f"unknown task {task!r}")
        out: dict[str, float] = {}
        for gold in self.scores:
            if task == "contextual":
                if gold.contextual_similarity is not None:
                    out[gold.pair.pair_id] = gold.contextual_similarity
            else:
                out[gold.pair.pair_id] = getattr(gold, task)
        return out


@dataclass(frozen=True)
class CodeContext:
    """A 5-line code window in which ``owner`` occurs; ``blank_slots`` are the
    (line, column, length) positions of every owner occurrence in the window.

    ``lines`` hold the original source; the blanked rendering is derived, so a
    re-fill of the blanks always reconstructs the original text exactly.
    """

    owner: Identifier
    lines: tuple[str, ...]
    blank_slots: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.lines) != 5:
            raise ValidationError(f"context must have exactly 5 lines, got {len(self.lines)}")
        if not self.blank_slots:
            raise ValidationError("context must have at least one blank slot")
        text = self.owner.text
        for line, col, length in self.blank_slots:
            if not (0 <= line < 5 and col >= 0 and length == len(text)):
                raise ValidationError(f"blank slot out of range: {(line, col, length)}")
            if self.lines[line][col:col + length] != text:
                raise ValidationError(f"blank slot {(line, col, length)} does not hold {text!r}")

    def blanked_lines(self, fill: str | None = None) -> list[str]:
        """Lines with every owner occurrence replaced; by default the
        replacement preserves length (underscores), so re-filling the slots
        with the owner restores the original lines byte-exactly."""
        out = list(self.lines)
        # Right-to-left so earlier columns stay valid when fill changes length.
        for line, col, length in sorted(self.blank_slots, reverse=True):
            replacement = fill if fill is not None else "_" * length
            out[line] = out[line][:col] + replacement + out[line][col + length:]
        return out


@dataclass
class ParsedRatings:
    """Ratings plus the pair registry recovered from the id columns."""

    direct: list[DirectRating] = field(default_factory=list)
    indirect: list[IndirectRating] = field(default_factory=list)
    pairs: dict[str, IdentifierPair] = field(default_factory=dict)


# ── benchmark CSV ────────────────────────────────────────────────


def _format_score(value: float | None) -> str:
    return "" if value is None else f"{value:.{SCORE_DECIMALS}f}"


def _parse_score(text: str, column: str, line: int) -> float | None:
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"non-numeric {column} {text!r}", line) from None
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"line {line}: {column} score {value} outside [0,1]")
    return value


def parse_benchmark_csv(stream: IO[str] | Iterable[str], variant: str = "custom",
                        tau: float = 0.0, theta: float = 0.0) -> Benchmark:
    """Parse a benchmark CSV; row order is preserved.

    The variant/thresholds are metadata not stored in the CSV itself; callers
    that know them pass them in, otherwise the defaults mark them unknown.
    """
    lines = iter(enumerate(stream, start=1))
    try:
        _, header = next(lines)
    except StopIteration:
        raise ParseError("empty benchmark file", 1) from None
    if header.strip() != BENCHMARK_HEADER:
        raise ParseError(f"expected header {BENCHMARK_HEADER!r}", 1)
    scores: list[GoldScore] = []
    for lineno, raw in lines:
        row = raw.rstrip("\n")
        if not row:
            continue
        fields = row.split(",")
        if len(fields) != 5:
            raise ParseError(f"expected 5 columns, got {len(fields)}", lineno)
        id1, id2, rel, sim, ctx = fields
        if rel == "" or sim == "":
            raise ParseError("relatedness and similarity may not be empty", lineno)
        pair = IdentifierPair(Identifier(id1), Identifier(id2))
        scores.append(GoldScore(
            pair=pair,
            relatedness=_parse_score(rel, "relatedness", lineno),
            similarity=_parse_score(sim, "similarity", lineno),
            contextual_similarity=_parse_score(ctx, "contextual_similarity", lineno),
        ))
    return Benchmark(variant=variant, tau=tau, theta=theta, scores=scores)


def write_benchmark_csv(bench: Benchmark, stream: IO[str]) -> None:
    """Inverse of :func:`parse_benchmark_csv`; scores serialized with 6 decimals."""
    stream.write(BENCHMARK_HEADER + "\n")
    for gold in bench.scores:
        stream.write(",".join([
            gold.pair.id1.text,
            gold.pair.id2.text,
            _format_score(gold.relatedness),
            _format_score(gold.similarity),
            _format_score(gold.contextual_similarity),
        ]) + "\n")


# ── ratings CSVs ─────────────────────────────────────────────────


def _rating_rows(stream: IO[str] | Iterable[str], header: str, kind: str):
    lines = iter(enumerate(stream, start=1))
    try:
        _, first = next(lines)
    except StopIteration:
        raise ParseError(f"empty {kind} ratings file", 1) from None
    if first.strip() != header:
        raise ParseError(f"expected header {header!r}", 1)
    for lineno, raw in lines:
        row = raw.rstrip("\n")
        if not row:
            continue
        fields = row.split(",")
        if len(fields) != 6:
            raise ParseError(f"expected 6 columns, got {len(fields)}", lineno)
        yield lineno, fields


def _parse_likert(text: str, column: str, line: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"non-integer {column} {text!r}", line) from None
    if not 1 <= value <= 5:
        raise ValidationError(f"line {line}: {column} {value} outside 1..5")
    return value


def parse_ratings(stream: IO[str] | Iterable[str], kind: str) -> ParsedRatings:
    """Parse a direct or indirect ratings CSV.

    Participants and pair_ids are preserved verbatim; the id1/id2 columns feed
    the returned pair registry so later stages can recover identifier texts.
    """
    out = ParsedRatings()
    if kind == "direct":
        for lineno, fields in _rating_rows(stream, DIRECT_HEADER, kind):
            participant, pair_id, id1, id2, rel, sim = fields
            out.direct.append(DirectRating(
                participant=participant,
                pair_id=pair_id,
                relatedness=_parse_likert(rel, "relatedness", lineno),
                similarity=_parse_likert(sim, "similarity", lineno),
            ))
            out.pairs.setdefault(pair_id, IdentifierPair(Identifier(id1), Identifier(id2), pair_id))
    elif kind == "indirect":
        for lineno, fields in _rating_rows(stream, INDIRECT_HEADER, kind):
            participant, pair_id, id1, id2, owner, chosen = fields
            if owner not in ("id1", "id2"):
                raise ValidationError(f"line {lineno}: context_owner {owner!r} not in id1/id2")
            if chosen not in ("id1", "id2"):
                raise ValidationError(f"line {lineno}: chosen {chosen!r} not in id1/id2")
            out.indirect.append(IndirectRating(
                participant=participant, pair_id=pair_id, context_owner=owner, chosen=chosen))
            out.pairs.setdefault(pair_id, IdentifierPair(Identifier(id1), Identifier(id2), pair_id))
    else:
        raise ValidationError(f"unknown ratings kind {kind!r}")
    return out


def write_direct_ratings(ratings: Iterable[DirectRating], pairs: dict[str, IdentifierPair],
                         stream: IO[str]) -> None:
    stream.write(DIRECT_HEADER + "\n")
    for rating in ratings:
        pair = pairs[rating.pair_id]
        stream.write(",".join([
            rating.participant, rating.pair_id, pair.id1.text, pair.id2.text,
            str(rating.relatedness), str(rating.similarity),
        ]) + "\n")


def write_indirect_ratings(ratings: Iterable[IndirectRating], pairs: dict[str, IdentifierPair],
                           stream: IO[str]) -> None:
    stream.write(INDIRECT_HEADER + "\n")
    for rating in ratings:
        pair = pairs[rating.pair_id]
        stream.write(",".join([
            rating.participant, rating.pair_id, pair.id1.text, pair.id2.text,
            rating.context_owner, rating.chosen,
        ]) + "\n")


# ── contexts JSONL ───────────────────────────────────────────────


def parse_contexts_jsonl(stream: IO[str] | Iterable[str]) -> list[CodeContext]:
    contexts = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
        try:
            contexts.append(CodeContext(
                owner=Identifier(obj["owner"]),
                lines=tuple(obj["lines"]),
                blank_slots=tuple((int(l), int(c), int(n)) for l, c, n in obj["blanks"]),
            ))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"missing or malformed field: {exc}", lineno) from None
    return contexts


def write_contexts_jsonl(contexts: Iterable[CodeContext], stream: IO[str]) -> None:
    for ctx in contexts:
        stream.write(json.dumps({
            "owner": ctx.owner.text,
            "lines": list(ctx.lines),
            "blanks": [list(slot) for slot in ctx.blank_slots],
        }) + "\n")


# ── per-task score CSVs ──────────────────────────────────────────

SCORE_FILE_HEADER = "id1,id2,score"


def parse_score_csv(stream: IO[str] | Iterable[str]) -> dict[str, float | None]:
    """Parse a per-representation score file into pair_id -> score (None = missing)."""
    scores: dict[str, float | None] = {}
    for lineno, raw in enumerate(stream, start=1):
        row = raw.rstrip("\n")
        if not row or (lineno == 1 and row.strip() == SCORE_FILE_HEADER):
            continue
        fields = row.split(",")
        if len(fields) != 3:
            raise ParseError(f"expected 3 columns, got {len(fields)}", lineno)
        id1, id2, text = fields
        pair_id = canonical_pair_id(id1, id2)
        if text == "":
            scores[pair_id] = None
        else:
            try:
                scores[pair_id] = float(text)
            except ValueError:
                raise ParseError(f"non-numeric score {text!r}", lineno) from None
    return scores


def write_score_csv(pairs: Iterable[IdentifierPair], scores: dict[str, float | None],
                    stream: IO[str]) -> None:
    stream.write(SCORE_FILE_HEADER + "\n")
    for pair in pairs:
        value = scores.get(pair.pair_id)
        text = "" if value is None else f"{value:.{SCORE_DECIMALS}f}"
        stream.write(f"{pair.id1.text},{pair.id2.text},{text}\n")
