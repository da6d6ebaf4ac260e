"""Measures agreement between semantic representations and a benchmark:
Spearman rank correlation, per-task evaluation, and tagged-subset analysis."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import (
    InsufficientDataError,
    ParseError,
    UndefinedCorrelationError,
    ValidationError,
)
from .model import Benchmark, IdentifierPair

TASKS = ("relatedness", "similarity", "contextual")
SUBSET_TAGS = ("abbreviations", "opposites", "synonyms", "added_subtoken",
               "tricky_tokenization")


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n with ties receiving the mean of their rank span."""
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=np.float64)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman's rank correlation: the Pearson correlation of average ranks."""
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise InsufficientDataError(f"need at least 3 points, got {len(x)}")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float((dx * dx).sum())
    vy = float((dy * dy).sum())
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelationError("correlation undefined for a constant list")
    # sqrt of the product (not product of sqrts) so that identical or exactly
    # reversed rankings come out as +/-1.0 exactly.
    return float((dx * dy).sum() / math.sqrt(vx * vy))


@dataclass
class ScoreMatrix:
    """Per-pair similarity scores from each representation; None marks a
    missing (e.g. out-of-vocabulary) score."""

    pairs: list[IdentifierPair]
    columns: dict[str, list[float | None]] = field(default_factory=dict)

    def __post_init__(self):
        for name, column in self.columns.items():
            if len(column) != len(self.pairs):
                raise ValidationError(
                    f"column {name!r} has {len(column)} scores for {len(self.pairs)} pairs")

    def add_column(self, name: str, scores_by_pair: dict[str, float | None]) -> None:
        self.columns[name] = [scores_by_pair.get(p.pair_id) for p in self.pairs]


@dataclass(frozen=True)
class SubsetTag:
    tag: str
    pair_id: str

    def __post_init__(self):
        if self.tag not in SUBSET_TAGS:
            raise ValidationError(f"unknown subset tag {self.tag!r}")


def parse_tags_csv(stream: IO[str] | Iterable[str]) -> list[SubsetTag]:
    """Tags CSV: ``pair_id,tag`` with optional header."""
    tags = []
    for lineno, raw in enumerate(stream, start=1):
        row = raw.rstrip("\n")
        if not row or (lineno == 1 and row.strip() == "pair_id,tag"):
            continue
        fields = row.split(",")
        if len(fields) != 2:
            raise ParseError(f"expected 2 columns, got {len(fields)}", lineno)
        tags.append(SubsetTag(tag=fields[1], pair_id=fields[0]))
    return tags


@dataclass
class EvalResult:
    representation: str
    task: str
    correlation: float | None
    coverage: float
    n: int
    status: str  # "ok" | "insufficient" | "undefined"

    def as_dict(self) -> dict:
        return {
            "representation": self.representation,
            "task": self.task,
            "correlation": self.correlation,
            "coverage": self.coverage,
            "n": self.n,
            "status": self.status,
        }


def evaluate(scores: Sequence[float | None], pairs: Sequence[IdentifierPair],
             bench: Benchmark, task: str) -> tuple[float, float]:
    """Correlation and coverage of one score column against one task.

    Only pairs with both a present score and a present gold score enter the
    correlation; coverage is their fraction of the task's gold pairs.
    """
    gold = bench.gold_for_task(task)
    xs: list[float] = []
    ys: list[float] = []
    for pair, score in zip(pairs, scores):
        if score is not None and pair.pair_id in gold:
            xs.append(score)
            ys.append(gold[pair.pair_id])
    total = len(gold)
    if len(xs) < 3:
        raise InsufficientDataError(
            f"only {len(xs)} comparable pairs for task {task!r}")
    coverage = len(xs) / total if total else 0.0
    return spearman(xs, ys), coverage


def _evaluate_to_result(name: str, task: str, scores: Sequence[float | None],
                        pairs: Sequence[IdentifierPair], bench: Benchmark) -> EvalResult:
    gold = bench.gold_for_task(task)
    total = len(gold)
    try:
        correlation, coverage = evaluate(scores, pairs, bench, task)
        return EvalResult(name, task, correlation, coverage, int(round(coverage * total)), "ok")
    except InsufficientDataError:
        n = sum(1 for p, s in zip(pairs, scores) if s is not None and p.pair_id in gold)
        return EvalResult(name, task, None, (n / total) if total else 0.0, n, "insufficient")
    except UndefinedCorrelationError:
        n = sum(1 for p, s in zip(pairs, scores) if s is not None and p.pair_id in gold)
        return EvalResult(name, task, None, (n / total) if total else 0.0, n, "undefined")


def evaluate_matrix(matrix: ScoreMatrix, bench: Benchmark,
                    tasks: Sequence[str] = TASKS) -> list[EvalResult]:
    results = []
    for name in matrix.columns:
        for task in tasks:
            results.append(_evaluate_to_result(name, task, matrix.columns[name],
                                               matrix.pairs, bench))
    return results


def subset_report(matrix: ScoreMatrix, bench: Benchmark,
                  tags: Sequence[SubsetTag],
                  tasks: Sequence[str] = TASKS) -> list[dict]:
    """Per-(representation, tag, task) evaluation restricted to tagged pairs.

    Cells with fewer than 3 comparable pairs (or a constant column) are
    flagged rather than erroring out.
    """
    by_tag: dict[str, set[str]] = {}
    for tag in tags:
        by_tag.setdefault(tag.tag, set()).add(tag.pair_id)

    rows = []
    for tag_name in sorted(by_tag):
        member_ids = by_tag[tag_name]
        member_idx = [i for i, p in enumerate(matrix.pairs) if p.pair_id in member_ids]
        sub_pairs = [matrix.pairs[i] for i in member_idx]
        sub_bench = Benchmark(
            variant=bench.variant, tau=bench.tau, theta=bench.theta,
            scores=[g for g in bench.scores if g.pair.pair_id in member_ids],
        )
        for name, column in matrix.columns.items():
            sub_scores = [column[i] for i in member_idx]
            for task in tasks:
                result = _evaluate_to_result(name, task, sub_scores, sub_pairs, sub_bench)
                rows.append({"tag": tag_name, **result.as_dict()})
    return rows


# ── reporting ────────────────────────────────────────────────────


def report_table(results: Sequence[EvalResult]) -> str:
    """Human-readable fixed-width table of evaluation results."""
    header = f"{'representation':<20} {'task':<12} {'correlation':>11} {'coverage':>9} {'n':>5}"
    lines = [header, "-" * len(header)]
    for result in results:
        corr = f"{result.correlation:.4f}" if result.correlation is not None else result.status
        lines.append(
            f"{result.representation:<20} {result.task:<12} {corr:>11} "
            f"{result.coverage:>9.3f} {result.n:>5}")
    return "\n".join(lines)


def report_json(results: Sequence[EvalResult], bench: Benchmark,
                subsets: Sequence[dict] | None = None) -> dict:
    """Stable machine-readable report object."""
    out = {
        "schema": "idbench-report-v1",
        "benchmark": {
            "variant": bench.variant,
            "tau": bench.tau,
            "theta": bench.theta,
            "pairs": len(bench.scores),
        },
        "results": [r.as_dict() for r in results],
    }
    if subsets is not None:
        out["subsets"] = list(subsets)
    return out


def write_report(results: Sequence[EvalResult], bench: Benchmark, stream: IO[str],
                 subsets: Sequence[dict] | None = None) -> None:
    json.dump(report_json(results, bench, subsets), stream, indent=2)
    stream.write("\n")
