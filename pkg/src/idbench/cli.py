"""Command-line interface: ``idbench <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import ensemble as ens
from . import evaluator as ev
from . import miner
from . import model
from . import pipeline
from . import strdist
from . import trainer
from .embeddings import load_vectors, nearest_neighbors, save_vectors, score_pairs
from .errors import IdBenchError


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        args.func(args)
    except (IdBenchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idbench")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("build", help="build benchmarks from raw ratings")
    p.add_argument("--direct", required=True)
    p.add_argument("--indirect", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--downer-gain", type=float, default=0.10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("strdist", help="string-distance similarity of two identifiers")
    p.add_argument("--kind", choices=["lv", "nw"], required=True)
    p.add_argument("id1")
    p.add_argument("id2")
    p.set_defaults(func=cmd_strdist)

    p = sub.add_parser("train", help="train embeddings on a token corpus")
    p.add_argument("--corpus", required=True, help="text file, one token sequence per line")
    p.add_argument("--mode", choices=["cbow", "sg"], required=True)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--neg", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--subword", default=None, help="MIN,MAX character n-gram sizes")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("knn", help="nearest neighbors of a token")
    p.add_argument("--vectors", required=True)
    p.add_argument("--token", required=True)
    p.add_argument("-k", type=int, default=5)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("mine", help="mine a JavaScript corpus")
    mine_sub = p.add_subparsers(dest="mine_command")

    m = mine_sub.add_parser("stats", help="identifier occurrence and role statistics")
    m.add_argument("--corpus", required=True)
    m.add_argument("--identifiers", help="file of benchmark identifiers, one per line")
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mine_stats)

    m = mine_sub.add_parser("sample", help="sample survey candidate pairs")
    m.add_argument("--corpus", required=True)
    m.add_argument("--vectors", required=True)
    m.add_argument("--band", action="append", default=[],
                   help="LO:HI:QUOTA cosine band, repeatable")
    m.add_argument("--min-count", type=int, default=50)
    m.add_argument("--random-pairs", type=int, default=0)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mine_sample)

    m = mine_sub.add_parser("contexts", help="extract 5-line survey contexts")
    m.add_argument("--corpus", required=True)
    m.add_argument("--identifier", action="append", default=[])
    m.add_argument("--identifiers", help="file of identifiers, one per line")
    m.add_argument("--n", type=int, default=5)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mine_contexts)

    m = mine_sub.add_parser("tokens", help="emit identifier token sequences for training")
    m.add_argument("--corpus", required=True)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mine_tokens)

    p = sub.add_parser("score", help="score pairs with a representation")
    p.add_argument("--pairs", required=True, help="CSV with id1,id2 columns")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--vectors", help="embedding file; cosine similarity")
    group.add_argument("--kind", choices=["lv", "nw"], help="string-distance similarity")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="evaluate score columns against a benchmark")
    p.add_argument("--bench", required=True)
    p.add_argument("--scores", required=True, help="comma-separated score CSV files")
    p.add_argument("--tags", help="subset tags CSV (pair_id,tag)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ensemble", help="fit / evaluate the ensemble combiner")
    p.add_argument("--bench", required=True)
    p.add_argument("--scores-dir", required=True,
                   help="directory with <representation>.csv for all seven columns")
    p.add_argument("--dict", required=True, dest="dictionary")
    p.add_argument("--task", choices=list(ev.TASKS), required=True)
    p.add_argument("--loo", action="store_true", help="report leave-one-out correlation")
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("serve", help="run the survey service")
    p.add_argument("--pairs", required=True)
    p.add_argument("--contexts", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_serve)

    return parser


# ── command implementations ──────────────────────────────────────


def cmd_build(args) -> None:
    with open(args.direct, encoding="utf-8") as handle:
        direct = model.parse_ratings(handle, "direct")
    with open(args.indirect, encoding="utf-8") as handle:
        indirect = model.parse_ratings(handle, "indirect")
    pairs = {**direct.pairs, **indirect.pairs}
    cfg = pipeline.CleaningConfig(tau=args.tau, theta=args.theta, downer_gain=args.downer_gain)
    bench, report = pipeline.build_benchmark(direct.direct, indirect.indirect, pairs, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "benchmark.csv", "w", encoding="utf-8") as handle:
        model.write_benchmark_csv(bench, handle)
    for task, filename in (("relatedness", "relatedness.csv"),
                           ("similarity", "similarity.csv"),
                           ("contextual", "contextual_similarity.csv")):
        gold = bench.gold_for_task(task)
        task_pairs = [g.pair for g in bench.scores if g.pair.pair_id in gold]
        with open(out / filename, "w", encoding="utf-8") as handle:
            model.write_score_csv(task_pairs, gold, handle)
    with open(out / "agreement.json", "w", encoding="utf-8") as handle:
        json.dump(report.as_dict(), handle, indent=2)
        handle.write("\n")
    print(f"benchmark variant={bench.variant} pairs={len(bench.scores)} "
          f"contextual={sum(1 for g in bench.scores if g.contextual_similarity is not None)}")


def cmd_strdist(args) -> None:
    print(f"{strdist.lexical_similarity(args.id1, args.id2, args.kind):.6f}")


def cmd_train(args) -> None:
    subword = None
    if args.subword:
        low, high = args.subword.split(",")
        subword = (int(low), int(high))
    cfg = trainer.TrainConfig(
        mode=args.mode, dim=args.dim, window=args.window, negatives=args.neg,
        epochs=args.epochs, learning_rate=args.lr, min_count=args.min_count,
        subword=subword, seed=args.seed,
    )
    store = trainer.train(trainer.read_token_file(args.corpus), cfg)
    with open(args.out, "w", encoding="utf-8") as handle:
        save_vectors(store, handle)
    print(f"trained {len(store.word_vectors)} vectors (dim {store.dim}) -> {args.out}")


def cmd_knn(args) -> None:
    with open(args.vectors, encoding="utf-8") as handle:
        store = load_vectors(handle)
    for token, sim in nearest_neighbors(store, args.token, args.k):
        print(f"{token} {sim:.6f}")


def _read_sources(corpus_dir: str) -> list[Path]:
    root = Path(corpus_dir)
    files = sorted(root.rglob("*.js"))
    if not files:
        files = sorted(p for p in root.rglob("*") if p.is_file())
    return files


def cmd_mine_stats(args) -> None:
    bench_ids: list[str] = []
    if args.identifiers:
        with open(args.identifiers, encoding="utf-8") as handle:
            bench_ids = [line.strip() for line in handle if line.strip()]
    stats = miner.corpus_stats(_read_sources(args.corpus), bench_ids)
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(stats.as_dict(), handle, indent=2)
        handle.write("\n")
    print(f"{stats.files_processed} files, {stats.total_occurrences} identifier occurrences")


def cmd_mine_sample(args) -> None:
    stats = miner.corpus_stats(_read_sources(args.corpus))
    with open(args.vectors, encoding="utf-8") as handle:
        store = load_vectors(handle)
    bands = []
    for spec_text in args.band:
        low, high, quota = spec_text.split(":")
        bands.append(miner.Band(float(low), float(high), int(quota)))
    cfg = miner.SamplingConfig(
        min_count=args.min_count, bands=bands,
        random_pairs=args.random_pairs, seed=args.seed,
    )
    pairs = miner.sample_pairs(stats.counts, store, cfg)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write("id1,id2\n")
        for pair in pairs:
            handle.write(f"{pair.id1.text},{pair.id2.text}\n")
    print(f"sampled {len(pairs)} pairs -> {args.out}")


def cmd_mine_contexts(args) -> None:
    identifiers = list(args.identifier)
    if args.identifiers:
        with open(args.identifiers, encoding="utf-8") as handle:
            identifiers.extend(line.strip() for line in handle if line.strip())
    if not identifiers:
        raise IdBenchError("no identifiers given (--identifier or --identifiers)")
    files = _read_sources(args.corpus)
    contexts = []
    for ident in identifiers:
        contexts.extend(miner.extract_contexts(files, ident, n_contexts=args.n, seed=args.seed))
    with open(args.out, "w", encoding="utf-8") as handle:
        model.write_contexts_jsonl(contexts, handle)
    print(f"extracted {len(contexts)} contexts -> {args.out}")


def cmd_mine_tokens(args) -> None:
    lines = miner.identifier_token_lines(_read_sources(args.corpus))
    with open(args.out, "w", encoding="utf-8") as handle:
        for tokens in lines:
            handle.write(" ".join(tokens) + "\n")
    print(f"wrote {len(lines)} token sequences -> {args.out}")


def _load_pairs_file(path: str) -> list[model.IdentifierPair]:
    from .survey import load_pairs_csv

    with open(path, encoding="utf-8") as handle:
        return load_pairs_csv(handle)


def cmd_score(args) -> None:
    pairs = _load_pairs_file(args.pairs)
    if args.vectors:
        with open(args.vectors, encoding="utf-8") as handle:
            store = load_vectors(handle)
        scores = score_pairs(store, pairs)
    else:
        scores = {
            pair.pair_id: strdist.lexical_similarity(pair.id1.text, pair.id2.text, args.kind)
            for pair in pairs
        }
    with open(args.out, "w", encoding="utf-8") as handle:
        model.write_score_csv(pairs, scores, handle)
    present = sum(1 for v in scores.values() if v is not None)
    print(f"scored {present}/{len(pairs)} pairs -> {args.out}")


def _load_benchmark(path: str) -> model.Benchmark:
    with open(path, encoding="utf-8") as handle:
        return model.parse_benchmark_csv(handle)


def cmd_eval(args) -> None:
    bench = _load_benchmark(args.bench)
    matrix = ev.ScoreMatrix(pairs=[g.pair for g in bench.scores])
    for path_text in args.scores.split(","):
        path = Path(path_text)
        with open(path, encoding="utf-8") as handle:
            matrix.add_column(path.stem, model.parse_score_csv(handle))
    results = ev.evaluate_matrix(matrix, bench)
    subsets = None
    if args.tags:
        with open(args.tags, encoding="utf-8") as handle:
            tags = ev.parse_tags_csv(handle)
        subsets = ev.subset_report(matrix, bench, tags)
    with open(args.out, "w", encoding="utf-8") as handle:
        ev.write_report(results, bench, handle, subsets)
    print(ev.report_table(results))


def cmd_ensemble(args) -> None:
    bench = _load_benchmark(args.bench)
    pairs = [g.pair for g in bench.scores]
    gold = bench.gold_for_task(args.task)
    pairs = [p for p in pairs if p.pair_id in gold]
    targets = [gold[p.pair_id] for p in pairs]

    columns = {}
    for name in ens.SCORE_ORDER:
        path = Path(args.scores_dir) / f"{name}.csv"
        if not path.exists():
            raise IdBenchError(f"missing score file {path}")
        with open(path, encoding="utf-8") as handle:
            columns[name] = model.parse_score_csv(handle)
    table = ens.score_table(pairs, columns)

    with open(args.dictionary, encoding="utf-8") as handle:
        dictionary = ens.load_dictionary(handle)

    if args.loo:
        result = ens.leave_one_out(pairs, table, targets, dictionary)
        print(f"leave-one-out spearman ({args.task}): {result.correlation:.4f} "
              f"({result.models_converged}/{len(pairs)} fits converged)")

    import numpy as np

    all_rows = np.arange(len(pairs))
    matrix = np.hstack([
        ens._impute(table, all_rows),
        ens.static_feature_rows(pairs, dictionary),
    ])
    fitted = ens.fit(matrix, targets)
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(fitted.to_json(), handle, indent=2)
        handle.write("\n")
    print(f"model ({'converged' if fitted.converged else 'pass limit reached'}, "
          f"{len(fitted.coefficients)} support vectors) -> {args.out}")


def cmd_serve(args) -> None:
    import uvicorn

    from .server import create_app
    from .survey import QuestionPool, SurveyStore

    pairs = _load_pairs_file(args.pairs)
    with open(args.contexts, encoding="utf-8") as handle:
        contexts = model.parse_contexts_jsonl(handle)
    by_owner: dict[str, list] = {}
    for ctx in contexts:
        by_owner.setdefault(ctx.owner.text, []).append(ctx)

    seed_text = os.environ.get("IDBENCH_SURVEY_SEED")
    base_seed = int(seed_text) if seed_text else None
    pool = QuestionPool(pairs=pairs, contexts=by_owner)
    store = SurveyStore(args.data, pool, base_seed=base_seed)
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
