from __future__ import annotations

import io
import json
import random

import pytest

from idbench.errors import (
    InsufficientDataError,
    UndefinedCorrelationError,
    ValidationError,
)
from idbench.evaluator import (
    EvalResult,
    ScoreMatrix,
    SubsetTag,
    evaluate,
    evaluate_matrix,
    parse_tags_csv,
    report_json,
    report_table,
    spearman,
    subset_report,
    write_report,
)
from idbench.model import Benchmark, GoldScore

from conftest import pair
from oracles import spearman_reference


class TestSpearman:
    def test_identical_ranking_is_one(self):
        assert spearman([0.1, 0.5, 0.9, 0.7], [1, 5, 9, 7]) == pytest.approx(1.0)

    def test_reversed_ranking_is_minus_one(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        assert spearman(x, x[::-1]) == pytest.approx(-1.0)

    def test_hand_ranked_example(self):
        # ranks of y are (2,1,3,5,4): cov=8, var=10 each, so rho=0.8
        assert spearman([1, 2, 3, 4, 5], [2, 1, 3, 5, 4]) == pytest.approx(0.8)
        assert spearman_reference([1, 2, 3, 4, 5], [2, 1, 3, 5, 4]) == pytest.approx(0.8)

    def test_matches_brute_force_with_ties(self):
        rng = random.Random(10)
        for _ in range(100):
            n = 50
            x = [rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for _ in range(n)]
            y = [rng.uniform(0, 1) if rng.random() < 0.7 else rng.choice(x) for _ in range(n)]
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            assert spearman(x, y) == pytest.approx(spearman_reference(x, y), abs=1e-12)

    def test_invariant_under_monotone_transform(self):
        rng = random.Random(11)
        x = [rng.uniform(0, 1) for _ in range(30)]
        y = [rng.uniform(0, 1) for _ in range(30)]
        transformed = [v ** 3 * 10 + 2 for v in x]
        assert spearman(transformed, y) == pytest.approx(spearman(x, y), abs=1e-12)

    def test_constant_list_undefined(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            spearman([1.0, 2.0], [2.0, 1.0])


def small_benchmark() -> Benchmark:
    scores = [
        GoldScore(pair("a", "b"), 0.9, 0.8, 0.7),
        GoldScore(pair("a", "c"), 0.7, 0.6, 0.5),
        GoldScore(pair("b", "c"), 0.5, 0.4, None),
        GoldScore(pair("c", "d"), 0.3, 0.2, 0.1),
        GoldScore(pair("d", "e"), 0.1, 0.05, 0.9),
    ]
    return Benchmark("custom", 0.2, 0.5, scores)


class TestEvaluate:
    def test_gold_itself_scores_one(self):
        bench = small_benchmark()
        pairs = [g.pair for g in bench.scores]
        gold = [g.similarity for g in bench.scores]
        correlation, coverage = evaluate(gold, pairs, bench, "similarity")
        assert correlation == pytest.approx(1.0)
        assert coverage == pytest.approx(1.0)

    def test_reversed_gold_scores_minus_one(self):
        bench = small_benchmark()
        pairs = [g.pair for g in bench.scores]
        scores = [1.0 - g.relatedness for g in bench.scores]
        correlation, _ = evaluate(scores, pairs, bench, "relatedness")
        assert correlation == pytest.approx(-1.0)

    def test_missing_scores_reduce_coverage(self):
        bench = small_benchmark()
        pairs = [g.pair for g in bench.scores]
        scores = [g.relatedness for g in bench.scores]
        scores[1] = None
        correlation, coverage = evaluate(scores, pairs, bench, "relatedness")
        assert coverage == pytest.approx(4 / 5)
        assert correlation == pytest.approx(1.0)

    def test_contextual_task_restricted_to_present_gold(self):
        bench = small_benchmark()
        pairs = [g.pair for g in bench.scores]
        scores = [g.contextual_similarity for g in bench.scores]
        correlation, coverage = evaluate(scores, pairs, bench, "contextual")
        assert correlation == pytest.approx(1.0)
        assert coverage == pytest.approx(1.0)

    def test_pair_order_invariance(self):
        bench = small_benchmark()
        pairs = [g.pair for g in bench.scores]
        scores = [0.2, 0.9, 0.4, 0.6, 0.1]
        base, _ = evaluate(scores, pairs, bench, "relatedness")
        order = [3, 0, 4, 1, 2]
        shuffled_pairs = [pairs[i] for i in order]
        shuffled_scores = [scores[i] for i in order]
        again, _ = evaluate(shuffled_scores, shuffled_pairs, bench, "relatedness")
        assert again == pytest.approx(base, abs=1e-12)

    def test_insufficient_comparable_pairs(self):
        bench = small_benchmark()
        pairs = [g.pair for g in bench.scores]
        scores = [0.5, 0.4, None, None, None]
        with pytest.raises(InsufficientDataError):
            evaluate(scores, pairs, bench, "relatedness")


class TestSubsetReport:
    def test_full_tag_set_equals_full_evaluate(self):
        bench = small_benchmark()
        matrix = ScoreMatrix(pairs=[g.pair for g in bench.scores])
        matrix.columns["rep"] = [0.8, 0.9, 0.2, 0.4, 0.3]
        tags = [SubsetTag("synonyms", g.pair.pair_id) for g in bench.scores]
        rows = subset_report(matrix, bench, tags, tasks=("relatedness",))
        full = evaluate_matrix(matrix, bench, tasks=("relatedness",))[0]
        assert rows[0]["correlation"] == pytest.approx(full.correlation)

    def test_constant_column_cell_flagged(self):
        bench = small_benchmark()
        matrix = ScoreMatrix(pairs=[g.pair for g in bench.scores])
        matrix.columns["rep"] = [0.5] * 5
        tags = [SubsetTag("opposites", g.pair.pair_id) for g in bench.scores]
        rows = subset_report(matrix, bench, tags, tasks=("relatedness",))
        assert rows[0]["status"] == "undefined"
        assert rows[0]["correlation"] is None

    def test_planted_ordered_and_antiordered_subsets(self):
        scores = [GoldScore(pair(f"x{i}", f"y{i}"), (i + 1) / 12, (i + 1) / 12)
                  for i in range(10)]
        bench = Benchmark("custom", 0.2, 0.5, scores)
        matrix = ScoreMatrix(pairs=[g.pair for g in scores])
        column = [g.relatedness for g in scores[:5]] + \
            [1.0 - g.relatedness for g in scores[5:]]
        matrix.columns["rep"] = column
        tags = [SubsetTag("synonyms", scores[i].pair.pair_id) for i in range(5)] + \
            [SubsetTag("opposites", scores[i].pair.pair_id) for i in range(5, 10)]
        rows = subset_report(matrix, bench, tags, tasks=("relatedness",))
        by_tag = {row["tag"]: row for row in rows}
        assert by_tag["synonyms"]["correlation"] == pytest.approx(1.0)
        assert by_tag["opposites"]["correlation"] == pytest.approx(-1.0)

    def test_small_subset_marked_insufficient(self):
        bench = small_benchmark()
        matrix = ScoreMatrix(pairs=[g.pair for g in bench.scores])
        matrix.columns["rep"] = [0.8, 0.9, 0.2, 0.4, 0.3]
        tags = [SubsetTag("abbreviations", bench.scores[0].pair.pair_id)]
        rows = subset_report(matrix, bench, tags, tasks=("relatedness",))
        assert rows[0]["status"] == "insufficient"

    def test_unknown_tag_rejected(self):
        with pytest.raises(ValidationError):
            SubsetTag("weird", "a|b")

    def test_parse_tags_csv(self):
        tags = parse_tags_csv(io.StringIO("pair_id,tag\na|b,synonyms\nc|d,opposites\n"))
        assert tags == [SubsetTag("synonyms", "a|b"), SubsetTag("opposites", "c|d")]


class TestReport:
    def test_empty_results_header_only(self):
        table = report_table([])
        assert len(table.splitlines()) == 2

    def test_three_tasks_three_rows(self):
        results = [EvalResult("rep", task, 0.5, 1.0, 5, "ok")
                   for task in ("relatedness", "similarity", "contextual")]
        assert len(report_table(results).splitlines()) == 5

    def test_json_round_trip(self):
        bench = small_benchmark()
        results = [EvalResult("rep", "similarity", 0.42, 0.9, 4, "ok")]
        out = io.StringIO()
        write_report(results, bench, out)
        parsed = json.loads(out.getvalue())
        assert parsed == report_json(results, bench)
        assert parsed["results"][0]["correlation"] == 0.42
        assert parsed["benchmark"]["variant"] == "custom"
