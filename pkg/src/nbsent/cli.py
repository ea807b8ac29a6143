"""Command-line entry points: train, evaluate, predict, sweep, ablate, bench.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from dataclasses import dataclass
from random import Random

from .classifier import (
    BERNOULLI,
    MULTINOMIAL,
    NEGATIVE,
    POSITIVE,
    SmoothingConfig,
    build_model,
    log_posterior,
    train,
)
from .corpus import (
    DataError,
    EvalReport,
    evaluate,
    load_split,
    peak_memory_bytes,
    split_validation,
)
from .pipeline import DEFAULT_NEGATORS, PipelineConfig, featurize
from .selection import (
    DEFAULT_SWEEP_KS,
    SelectionConfig,
    prune_singletons,
    select_top_k,
    sweep_k,
)
from .store import ModelFormatError, load, save

# The set of negator words the staged-reproduction harness uses; the
# richer DEFAULT_NEGATORS set stays the default for ad-hoc training.
ABLATION_NEGATORS = frozenset({"not", "n't"})

# Cumulative ablation stages; each row enables exactly one more feature
# of the pipeline than the previous one.
ABLATION_STAGES = (
    ("multinomial-laplace", dict(mode=MULTINOMIAL, negation=False, bootstrap=False, n_max=1, selection=False)),
    ("negation", dict(mode=MULTINOMIAL, negation=True, bootstrap=True, n_max=1, selection=False)),
    ("bernoulli", dict(mode=BERNOULLI, negation=True, bootstrap=True, n_max=1, selection=False)),
    ("ngrams", dict(mode=BERNOULLI, negation=True, bootstrap=True, n_max=3, selection=False)),
    ("selection", dict(mode=BERNOULLI, negation=True, bootstrap=True, n_max=3, selection=True)),
)

GNUPLOT_TEMPLATE = """\
set datafile separator ","
set logscale x
set xlabel "features kept (k)"
set ylabel "validation accuracy"
set grid
plot "{csv}" every ::1 using 1:2 with linespoints title "validation accuracy"
pause -1
"""


@dataclass
class RunConfig:
    """One resolved command invocation: dataset, flags, and derived configs."""

    data: str
    model_path: str = "model.nbsent"
    out: str | None = None
    mode: str = BERNOULLI
    negation: bool = True
    bootstrap: bool = True
    n_max: int = 3
    selection: bool = True
    top_k: int = 32000
    min_doc_freq: int = 2
    smoothing_k: float = 1.0
    negators: frozenset = DEFAULT_NEGATORS
    validation_size: int = 1000
    seed: int = 42
    threads: int = 1

    def pipeline(self) -> PipelineConfig:
        # Disabling negation is an empty negator set: the state machine
        # never fires and punctuation keeps its segmentation role.
        negators = self.negators if self.negation else frozenset()
        return PipelineConfig(n_max=self.n_max, negator_words=negators)

    def smoothing(self) -> SmoothingConfig:
        return SmoothingConfig(k=self.smoothing_k)

    def selection_config(self) -> SelectionConfig:
        return SelectionConfig(min_doc_freq=self.min_doc_freq, top_k=self.top_k)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    negation = not getattr(args, "no_negation", False)
    bootstrap = negation and not getattr(args, "no_bootstrap", False)
    n_max = 1 if getattr(args, "no_ngrams", False) else getattr(args, "nmax", 3)
    negators = frozenset(w for w in getattr(args, "negators", "").split(",") if w)
    cfg = RunConfig(
        data=getattr(args, "data", ""),
        model_path=getattr(args, "model", "model.nbsent"),
        out=getattr(args, "out", None),
        mode=MULTINOMIAL if getattr(args, "multinomial", False) else BERNOULLI,
        negation=negation,
        bootstrap=bootstrap,
        n_max=n_max,
        selection=not getattr(args, "no_selection", False),
        top_k=getattr(args, "k", 32000),
        min_doc_freq=getattr(args, "min_df", 2),
        smoothing_k=getattr(args, "smoothing_k", 1.0),
        negators=negators or DEFAULT_NEGATORS,
        validation_size=getattr(args, "validation_size", 1000),
        seed=getattr(args, "seed", 42),
        threads=getattr(args, "threads", 1),
    )
    if cfg.selection and cfg.mode == MULTINOMIAL:
        raise ValueError(
            "feature selection needs document frequencies (bernoulli mode); "
            "pass --no-selection together with --multinomial"
        )
    return cfg


def _fit(cfg: RunConfig, docs, pipeline=None):
    """Count, optionally prune and select, and finalize a model.

    Returns (model, stats dict with feature counts and timings).
    """
    pipeline = pipeline or cfg.pipeline()
    stats: dict = {}
    start = time.perf_counter()
    table = train(docs, pipeline, mode=cfg.mode, bootstrap=cfg.bootstrap, workers=cfg.threads)
    stats["train_seconds"] = time.perf_counter() - start
    stats["features_total"] = table.num_features()
    if cfg.selection:
        start = time.perf_counter()
        pruned = prune_singletons(table, cfg.min_doc_freq)
        stats["features_pruned"] = pruned.num_features()
        vocabulary = select_top_k(pruned, cfg.selection_config())
        stats["features_selected"] = len(vocabulary)
        stats["selection_seconds"] = time.perf_counter() - start
        model = build_model(pruned, vocabulary, pipeline, cfg.smoothing())
    else:
        model = build_model(table, None, pipeline, cfg.smoothing())
    return model, stats


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    docs = load_split(cfg.data, "train")
    training, validation = split_validation(docs, cfg.validation_size, cfg.seed)
    print(f"loaded {len(docs)} training documents "
          f"({len(training)} train / {len(validation)} validation)")
    model, stats = _fit(cfg, training)
    save(model, cfg.model_path)
    print(f"count pass: {stats['train_seconds']:.2f}s, "
          f"{stats['features_total']} distinct features")
    if cfg.selection:
        print(f"selection: {stats['selection_seconds']:.2f}s, "
              f"{stats['features_pruned']} after pruning, "
              f"{stats['features_selected']} selected")
    print(f"peak memory: {peak_memory_bytes() / 1e6:.0f} MB")
    print(f"model written to {cfg.model_path}")
    return 0


def _print_report(report: EvalReport) -> None:
    (pp, pn), (np_, nn) = report.confusion
    print(f"documents: {report.n_docs}")
    print(f"accuracy:  {report.accuracy:.4f}")
    print("confusion (rows gold, cols predicted; pos, neg):")
    print(f"  pos  {pp:6d} {pn:6d}")
    print(f"  neg  {np_:6d} {nn:6d}")
    print(f"wall time: {report.wall_time_seconds:.2f}s")


def cmd_evaluate(args: argparse.Namespace) -> int:
    model = load(args.model)
    docs = load_split(args.data, args.split)
    report = evaluate(model, docs, workers=args.threads)
    _print_report(report)
    record = json.dumps(report.as_dict(), sort_keys=True)
    print(record)
    if args.out:
        with open(args.out, "a", encoding="utf-8") as fh:
            fh.write(record + "\n")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load(args.model)
    if args.text is not None:
        lines = [args.text]
    else:
        lines = (line.rstrip("\n") for line in sys.stdin)
    multinomial = model.mode == MULTINOMIAL
    for line in lines:
        feats = featurize(line, model.pipeline, counts=multinomial)
        scores = log_posterior(model, feats)
        label = POSITIVE if scores[POSITIVE] >= scores[NEGATIVE] else NEGATIVE
        print(f"{label}\t{scores[POSITIVE]!r}\t{scores[NEGATIVE]!r}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    if cfg.validation_size <= 0:
        raise ValueError("sweep needs a validation holdout; pass --validation-size > 0")
    ks = [int(k) for k in args.ks.split(",")] if args.ks else list(DEFAULT_SWEEP_KS)
    docs = load_split(cfg.data, "train")
    training, validation = split_validation(docs, cfg.validation_size, cfg.seed)
    pipeline = cfg.pipeline()
    table = train(training, pipeline, mode=cfg.mode, bootstrap=cfg.bootstrap, workers=cfg.threads)
    pruned = prune_singletons(table, cfg.min_doc_freq)
    points = sweep_k(pruned, validation, ks, pipeline, cfg.smoothing())
    rows = ["k,accuracy"] + [f"{p.k},{p.accuracy:.6f}" for p in points]
    csv_text = "\n".join(rows) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
        gnuplot_path = cfg.out + ".gnuplot"
        with open(gnuplot_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(GNUPLOT_TEMPLATE.format(csv=cfg.out))
        print(f"sweep written to {cfg.out} (plot script: {gnuplot_path})")
        best = max(points, key=lambda p: p.accuracy)
        print(f"best k: {best.k} (validation accuracy {best.accuracy:.4f})")
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    train_docs = load_split(cfg.data, "train")
    test_docs = load_split(cfg.data, "test")
    negators = frozenset(w for w in args.negators.split(",") if w)
    rows: list[tuple[str, float]] = []
    cached_key = None
    cached_table = None
    for name, stage in ABLATION_STAGES:
        pipeline = PipelineConfig(
            n_max=stage["n_max"],
            negator_words=negators if stage["negation"] else frozenset(),
        )
        key = (pipeline, stage["mode"], stage["bootstrap"])
        if key == cached_key:
            table = cached_table
        else:
            table = train(
                train_docs,
                pipeline,
                mode=stage["mode"],
                bootstrap=stage["bootstrap"],
                workers=cfg.threads,
            )
            cached_key, cached_table = key, table
        if stage["selection"]:
            pruned = prune_singletons(table, cfg.min_doc_freq)
            vocabulary = select_top_k(pruned, cfg.selection_config())
            model = build_model(pruned, vocabulary, pipeline, cfg.smoothing())
        else:
            model = build_model(table, None, pipeline, cfg.smoothing())
        report = evaluate(model, test_docs, workers=cfg.threads)
        rows.append((name, report.accuracy))
        print(f"{name:22s} {report.accuracy:.4f}")
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("stage,accuracy\n")
            for name, accuracy in rows:
                fh.write(f"{name},{accuracy:.6f}\n")
        print(f"ablation table written to {cfg.out}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    train_docs = load_split(cfg.data, "train")
    test_docs = load_split(cfg.data, "test")
    pipeline = cfg.pipeline()
    rng = Random(cfg.seed)

    print("== training scaling (balanced subsamples) ==")
    pos = [d for d in train_docs if d.label == POSITIVE]
    neg = [d for d in train_docs if d.label == NEGATIVE]
    rng.shuffle(pos)
    rng.shuffle(neg)
    table = None
    for fraction in (0.25, 0.5, 1.0):
        n_half = max(1, int(len(pos) * fraction)), max(1, int(len(neg) * fraction))
        subsample = pos[: n_half[0]] + neg[: n_half[1]]
        start = time.perf_counter()
        table = train(subsample, pipeline, mode=cfg.mode, bootstrap=cfg.bootstrap,
                      workers=cfg.threads)
        elapsed = time.perf_counter() - start
        print(f"  {int(fraction * 100):3d}% ({len(subsample)} docs): {elapsed:.2f}s")

    if cfg.selection:
        start = time.perf_counter()
        pruned = prune_singletons(table, cfg.min_doc_freq)
        vocabulary = select_top_k(pruned, cfg.selection_config())
        model = build_model(pruned, vocabulary, pipeline, cfg.smoothing())
        print(f"== selection: {time.perf_counter() - start:.2f}s "
              f"({table.num_features()} -> {pruned.num_features()} -> {len(vocabulary)}) ==")
    else:
        model = build_model(table, None, pipeline, cfg.smoothing())

    report = evaluate(model, test_docs, workers=cfg.threads)
    print("== classification ==")
    print(f"  {report.n_docs} docs in {report.wall_time_seconds:.2f}s "
          f"({report.n_docs / max(report.wall_time_seconds, 1e-9):.0f} docs/sec)")

    # Two-point length scaling: classification cost should grow roughly
    # linearly with document length.
    words = [w for d in train_docs[:50] for w in d.text.split()][:4000]
    if words:
        repeats = 50
        timings = []
        for length in (200, 400):
            doc = " ".join(words[i % len(words)] for i in range(length))
            start = time.perf_counter()
            for _ in range(repeats):
                featurize_scores = log_posterior(
                    model, featurize(doc, model.pipeline, counts=model.mode == MULTINOMIAL)
                )
            timings.append((time.perf_counter() - start) / repeats)
            del featurize_scores
        print("== length scaling ==")
        print(f"  200 words: {timings[0] * 1e3:.2f} ms/doc")
        print(f"  400 words: {timings[1] * 1e3:.2f} ms/doc "
              f"(ratio {timings[1] / max(timings[0], 1e-12):.2f}, linear would be 2.0)")
    print(f"peak memory: {peak_memory_bytes() / 1e6:.0f} MB")
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 2; we reserve 2 for
    data errors, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_pipeline_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--nmax", type=int, choices=(1, 2, 3), default=3,
                     help="maximum n-gram order (default 3)")
    sub.add_argument("--no-ngrams", action="store_true",
                     help="unigram features only (same as --nmax 1)")
    sub.add_argument("--no-negation", action="store_true",
                     help="disable negation handling (implies --no-bootstrap)")
    sub.add_argument("--no-bootstrap", action="store_true",
                     help="disable bootstrapped negated counts")
    sub.add_argument("--multinomial", action="store_true",
                     help="count occurrences instead of document presence")
    sub.add_argument("--negators", default=",".join(sorted(DEFAULT_NEGATORS)),
                     help="comma-separated negator words")
    sub.add_argument("--smoothing-k", type=float, default=1.0,
                     help="add-k smoothing constant (default 1)")


def _add_selection_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--k", type=int, default=32000,
                     help="number of features to keep (default 32000)")
    sub.add_argument("--min-df", type=int, default=2,
                     help="minimum document frequency before ranking (default 2)")


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker processes for counting/classification (default 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nbsent",
                     description="Naive Bayes sentiment classifier for IMDB-style review corpora")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subparsers.add_parser("train", help="train and save a model")
    p.add_argument("--data", required=True, help="corpus root (aclImdb layout)")
    p.add_argument("--model", default="model.nbsent", help="output model path")
    p.add_argument("--validation-size", type=int, default=1000,
                   help="held-out validation documents (default 1000, 0 to disable)")
    p.add_argument("--no-selection", action="store_true",
                   help="keep the full vocabulary (skip pruning and ranking)")
    _add_pipeline_flags(p)
    _add_selection_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_train)

    p = subparsers.add_parser("evaluate", help="score a model on a dataset split")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--data", required=True, help="corpus root")
    p.add_argument("--split", default="test", choices=("train", "test"))
    p.add_argument("--out", default=None, help="append the JSON record to this file")
    _add_common_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = subparsers.add_parser("predict", help="classify text (argument or stdin lines)")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("text", nargs="?", default=None,
                   help="text to classify; omit to read lines from stdin")
    p.set_defaults(func=cmd_predict)

    p = subparsers.add_parser("sweep", help="validation accuracy vs number of features")
    p.add_argument("--data", required=True, help="corpus root")
    p.add_argument("--ks", default=None, help="comma-separated k grid")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--validation-size", type=int, default=1000)
    _add_pipeline_flags(p)
    _add_selection_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_sweep, no_selection=False)

    p = subparsers.add_parser("ablate", help="staged accuracy table on the test split")
    p.add_argument("--data", required=True, help="corpus root")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--negators", default=",".join(sorted(ABLATION_NEGATORS)),
                   help="negator words for the staged runs")
    _add_selection_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = subparsers.add_parser("bench", help="timing and memory report, no assertions")
    p.add_argument("--data", required=True, help="corpus root")
    p.add_argument("--no-selection", action="store_true")
    _add_pipeline_flags(p)
    _add_selection_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (DataError, ModelFormatError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
