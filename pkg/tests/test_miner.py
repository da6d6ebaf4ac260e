from __future__ import annotations

import json
import random

import numpy as np
import pytest

from idbench.embeddings import EmbeddingStore
from idbench.errors import ConfigError, SamplingError
from idbench.miner import (
    Band,
    SamplingConfig,
    corpus_stats,
    extract_contexts,
    identifier_token_lines,
    lex_identifiers,
    sample_pairs,
    tokenize_js,
)

from conftest import FIXTURES, pair


def idents(source: str) -> list[tuple[str, str]]:
    return [(name, role) for name, role, _pos in lex_identifiers(source)]


class TestLexer:
    def test_variable_and_property_rules(self):
        assert idents("var x = obj.len;") == [
            ("x", "variable"), ("obj", "variable"), ("len", "property")]

    def test_function_declaration_and_params(self):
        assert idents("function foo(a) { return a; }") == [
            ("foo", "function"), ("a", "variable"), ("a", "variable")]

    def test_comments_and_strings_skipped(self):
        assert idents("// len\n\"len\"\n'len'\n/* len */") == []

    def test_template_literals_skipped_entirely(self):
        assert idents("var t = `len ${hidden} more`;") == [("t", "variable")]

    def test_method_call_is_function(self):
        assert idents("obj.push(1);") == [("obj", "variable"), ("push", "function")]

    def test_object_literal_keys_are_properties(self):
        assert idents("var o = { width: 1, height: 2 };") == [
            ("o", "variable"), ("width", "property"), ("height", "property")]

    def test_ternary_branch_before_colon_is_other(self):
        assert idents("x ? yes : no;") == [
            ("x", "variable"), ("yes", "other"), ("no", "variable")]

    def test_regex_literal_skipped_division_kept(self):
        assert idents("var re = /abc+/g;") == [("re", "variable")]
        assert idents("total / count") == [("total", "variable"), ("count", "variable")]

    def test_unterminated_string_consumes_to_end_of_line(self):
        assert idents('var a = "oops\nb.c();') == [
            ("a", "variable"), ("b", "variable"), ("c", "function")]

    def test_keywords_not_identifiers(self):
        assert idents("if (true) { return null; }") == []

    def test_numbers_not_identifiers(self):
        assert idents("var x = 0x1f + 2.5e3;") == [("x", "variable")]

    def test_positions_are_line_and_column(self):
        tokens = lex_identifiers("var a;\n  b = a;")
        assert tokens[0][2] == (0, 4)
        assert tokens[1][2] == (1, 2)
        assert tokens[2][2] == (1, 6)

    def test_concatenation_does_not_change_per_file_streams(self):
        first = "var a = 1;\n"
        second = "b.c(d);\n"
        assert idents(first) + idents(second) == idents(first + second)

    def test_no_identifiers_from_literals_random_sources(self):
        rng = random.Random(8)
        words = ["alpha", "beta", "gamma", "delta"]
        for _ in range(50):
            hidden = rng.choice(words)
            visible = rng.choice(words)
            source = f'// {hidden}\nvar {visible} = "{hidden}" + `{hidden}`;\n'
            names = [n for n, _ in idents(source)]
            assert names == [visible]

    def test_tokenize_keeps_significant_tokens(self):
        kinds = [t.kind for t in tokenize_js("var x = 1;")]
        assert kinds == ["keyword", "identifier", "punct", "number", "punct"]


class TestCorpusStats:
    def test_fixture_corpus_matches_hand_counts(self, corpus_files):
        expected = json.loads((FIXTURES / "expected_counts.json").read_text())
        stats = corpus_stats(corpus_files, bench_identifiers=list(expected["identifiers"]))
        assert stats.files_processed == expected["files"]
        assert stats.total_occurrences == expected["total_occurrences"]
        for name, info in expected["identifiers"].items():
            got = stats.bench_stats[name]
            assert got.count == info["count"], name
            for role, count in info["roles"].items():
                assert got.role_counts[role] == count, (name, role)

    def test_role_counts_sum_to_count(self, corpus_files):
        stats = corpus_stats(corpus_files, bench_identifiers=["result", "counter0", "width30"])
        for s in stats.bench_stats.values():
            assert sum(s.role_counts.values()) == s.count

    def test_coverage_simple_file(self):
        stats = corpus_stats([("f.js", "a; a; b;")], bench_identifiers=["a"])
        assert stats.total_occurrences == 3
        assert stats.coverage == pytest.approx(2 / 3)

    def test_empty_corpus_flagged(self):
        stats = corpus_stats([], bench_identifiers=["a"])
        assert stats.total_occurrences == 0
        assert stats.coverage == 0.0
        assert not stats.coverage_defined

    def test_unreadable_file_skipped_and_tallied(self, tmp_path):
        good = tmp_path / "good.js"
        good.write_text("var a;")
        stats = corpus_stats([good, tmp_path / "missing.js"], bench_identifiers=["a"])
        assert stats.files_processed == 1
        assert stats.files_skipped == 1

    def test_primary_role_majority_else_mixed(self):
        stats = corpus_stats(
            [("f.js", "tool(); tool(); var tool;")], bench_identifiers=["tool"])
        assert stats.bench_stats["tool"].primary_role == "function"
        stats = corpus_stats(
            [("f.js", "tool(); var tool;")], bench_identifiers=["tool"])
        assert stats.bench_stats["tool"].primary_role == "mixed"

    def test_absent_identifier_counts_zero(self):
        stats = corpus_stats([("f.js", "var a;")], bench_identifiers=["zz"])
        assert stats.bench_stats["zz"].count == 0
        assert stats.bench_count_min == 0


class TestSamplePairs:
    def make_store(self, vectors: dict[str, list[float]]) -> EmbeddingStore:
        return EmbeddingStore(
            dim=2, word_vectors={t: np.array(v) for t, v in vectors.items()})

    def test_forced_band_choice(self):
        store = self.make_store({"a": [1.0, 0.0], "b": [1.0, 0.32], "c": [0.0, 1.0]})
        counts = {"a": 100, "b": 100, "c": 100}
        cfg = SamplingConfig(min_count=50, bands=[Band(0.9, 1.0, 1)], seed=1)
        pairs = sample_pairs(counts, store, cfg)
        assert len(pairs) == 1
        assert pairs[0].pair_id == "a|b"

    def test_unsatisfiable_quota_names_band(self):
        store = self.make_store({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        cfg = SamplingConfig(min_count=0, bands=[Band(0.9, 1.0, 5)])
        with pytest.raises(SamplingError) as err:
            sample_pairs({"a": 10, "b": 10}, store, cfg)
        assert "0.9" in str(err.value)

    def test_fixed_seed_deterministic(self):
        rng = np.random.default_rng(4)
        store = self.make_store({f"t{i}": list(rng.normal(size=2)) for i in range(12)})
        counts = {t: 100 for t in store.word_vectors}
        cfg = SamplingConfig(min_count=50, bands=[Band(-1.0, 1.0, 5)],
                             random_pairs=3, seed=77)
        first = sample_pairs(counts, store, cfg)
        second = sample_pairs(counts, store, cfg)
        assert [p.pair_id for p in first] == [p.pair_id for p in second]

    def test_min_count_respected_and_band_membership(self):
        rng = np.random.default_rng(5)
        store = self.make_store({f"t{i}": list(rng.normal(size=2)) for i in range(10)})
        counts = {t: (200 if t != "t0" else 10) for t in store.word_vectors}
        cfg = SamplingConfig(min_count=50, bands=[Band(-0.5, 0.5, 4)], seed=2)
        pairs = sample_pairs(counts, store, cfg)
        for p in pairs:
            assert p.id1.text != "t0" and p.id2.text != "t0"
            va = store.word_vectors[p.id1.text]
            vb = store.word_vectors[p.id2.text]
            cosine = va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb))
            assert -0.5 <= cosine <= 0.5

    def test_manual_pairs_and_dedup(self):
        store = self.make_store({"a": [1.0, 0.0], "b": [1.0, 0.1]})
        cfg = SamplingConfig(min_count=0, bands=[Band(0.9, 1.0, 1)],
                             manual_pairs=[pair("a", "b"), pair("x", "y")], seed=0)
        pairs = sample_pairs({"a": 10, "b": 10}, store, cfg)
        assert [p.pair_id for p in pairs] == ["a|b", "x|y"]

    def test_overlapping_bands_rejected(self):
        with pytest.raises(ConfigError):
            SamplingConfig(bands=[Band(0.0, 0.5, 1), Band(0.4, 0.9, 1)])


class TestExtractContexts:
    def test_single_occurrence_mid_file(self):
        source = "line0\nline1\nvar needle = 1;\nline3\nline4\nline5\n"
        contexts = extract_contexts([("f.js", source)], "needle")
        assert len(contexts) == 1
        ctx = contexts[0]
        assert len(ctx.lines) == 5
        assert ctx.lines[2] == "var needle = 1;"
        assert ctx.blank_slots == ((2, 4, 6),)

    def test_occurrence_on_first_line_clips_downward(self):
        source = "var needle;\nline1\nline2\nline3\nline4\nline5\n"
        ctx = extract_contexts([("f.js", source)], "needle")[0]
        assert ctx.lines[0] == "var needle;"
        assert len(ctx.lines) == 5

    def test_short_file_padded_to_five_lines(self):
        ctx = extract_contexts([("f.js", "var needle;\nneedle++;")], "needle")[0]
        assert len(ctx.lines) == 5
        assert ctx.lines[3] == "" and ctx.lines[4] == ""

    def test_two_occurrences_in_window_give_two_blanks(self):
        source = "a\nneedle = needle + 1;\nb\nc\nd\n"
        ctx = extract_contexts([("f.js", source)], "needle")[0]
        assert len(ctx.blank_slots) == 2

    def test_occurrences_in_strings_not_blanked(self):
        source = 'var needle = "needle";\na\nb\nc\nd\n'
        ctx = extract_contexts([("f.js", source)], "needle")[0]
        assert ctx.blank_slots == ((0, 4, 6),)

    def test_blank_and_refill_reconstructs_source(self, corpus_files):
        for name in ("result", "counter3"):
            for ctx in extract_contexts(corpus_files, name, n_contexts=5, seed=1):
                blanked = ctx.blanked_lines()
                refilled = list(blanked)
                for line, col, length in ctx.blank_slots:
                    refilled[line] = (refilled[line][:col] + name
                                      + refilled[line][col + length:])
                assert tuple(refilled) == ctx.lines

    def test_fewer_occurrences_than_requested_returns_all(self):
        contexts = extract_contexts([("f.js", "var needle;\n")], "needle", n_contexts=5)
        assert len(contexts) == 1

    def test_sampling_is_seeded(self, corpus_files):
        first = extract_contexts(corpus_files, "result", n_contexts=3, seed=9)
        second = extract_contexts(corpus_files, "result", n_contexts=3, seed=9)
        assert first == second


class TestTokenLines:
    def test_one_line_per_file_in_order(self):
        lines = identifier_token_lines([("a.js", "var x = y;"), ("b.js", "z();")])
        assert lines == [["x", "y"], ["z"]]
