"""Lexical string-distance similarity functions (Levenshtein, Needleman-Wunsch)."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UndefinedSimilarityError, ValidationError


@dataclass(frozen=True)
class AlignmentParams:
    match_score: float = 1.0
    mismatch_penalty: float = -1.0
    gap_penalty: float = -1.0

    def __post_init__(self):
        if not self.match_score > self.mismatch_penalty:
            raise ValidationError("match_score must exceed mismatch_penalty")
        if not self.gap_penalty < self.match_score:
            raise ValidationError("gap_penalty must be below match_score")


def levenshtein(a: str, b: str) -> int:
    """Minimal number of character insertions, deletions, and substitutions
    transforming ``a`` into ``b``."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(
                previous[j] + 1,        # delete from a
                current[j - 1] + 1,     # insert into a
                previous[j - 1] + cost, # substitute / match
            ))
        previous = current
    return previous[-1]


def needleman_wunsch(a: str, b: str, params: AlignmentParams = AlignmentParams()) -> float:
    """Optimal global alignment score of ``a`` and ``b``; higher means more similar."""
    gap = params.gap_penalty
    rows = len(a) + 1
    cols = len(b) + 1
    previous = [j * gap for j in range(cols)]
    for i in range(1, rows):
        current = [i * gap]
        ca = a[i - 1]
        for j in range(1, cols):
            diag = params.match_score if ca == b[j - 1] else params.mismatch_penalty
            current.append(max(
                previous[j] + gap,
                current[j - 1] + gap,
                previous[j - 1] + diag,
            ))
        previous = current
    return previous[-1]


def lexical_similarity(a: str, b: str, kind: str = "lv",
                       params: AlignmentParams = AlignmentParams()) -> float:
    """Similarity in [0,1] from a string distance: 1 for identical strings.

    lv: 1 - distance / max length. nw: alignment score min-max normalized
    between the all-gaps worst case and the perfect-match best case.
    """
    if not a and not b:
        raise UndefinedSimilarityError("similarity of two empty strings is undefined")
    if kind == "lv":
        return 1.0 - levenshtein(a, b) / max(len(a), len(b))
    if kind == "nw":
        best = params.match_score * max(len(a), len(b))
        worst = params.gap_penalty * (len(a) + len(b))
        if best == worst:
            return 1.0
        return (needleman_wunsch(a, b, params) - worst) / (best - worst)
    raise ValidationError(f"unknown string distance kind {kind!r}")
