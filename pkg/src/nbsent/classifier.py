"""Naive Bayes training and scoring over pipeline features.

Counting supports two modes: "bernoulli" (document-level presence,
duplicates removed) and "multinomial" (raw occurrence counts).  With
bootstrapping enabled, every counted feature also credits its
negation-toggled form to the opposite class, so negated forms that are
rare in the corpus inherit statistics from their plain counterparts.

Class-conditional probabilities use add-k smoothing over the per-class
word mass:

    p(feature | class) = (count + k) / ((k + 1) * word_mass)

where ``word_mass`` is the total number of counted feature occurrences
in the class (unique-per-document in bernoulli mode, bootstrapped
contributions included).  This denominator is deliberately not a
normalizing constant over the vocabulary; scores are compared between
classes, never summed over features.  Scoring runs in log space because
linear-space products underflow on documents of a few hundred words.
"""

from __future__ import annotations

import math
import multiprocessing
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .pipeline import DEFAULT_CONFIG, PipelineConfig, featurize, toggle_negation

if TYPE_CHECKING:
    from .corpus import LabeledDoc

POSITIVE = "pos"
NEGATIVE = "neg"
LABELS = (POSITIVE, NEGATIVE)
OPPOSITE = {POSITIVE: NEGATIVE, NEGATIVE: POSITIVE}

BERNOULLI = "bernoulli"
MULTINOMIAL = "multinomial"
MODES = (BERNOULLI, MULTINOMIAL)

FIXED_AT_TRAINING = "fixed_at_training"
RECOMPUTED_OVER_SELECTED = "recomputed_over_selected"
DENOMINATOR_POLICIES = (FIXED_AT_TRAINING, RECOMPUTED_OVER_SELECTED)


@dataclass(frozen=True)
class SmoothingConfig:
    k: float = 1.0

    def __post_init__(self) -> None:
        if not self.k > 0:
            raise ValueError(f"smoothing k must be positive, got {self.k}")


DEFAULT_SMOOTHING = SmoothingConfig()


def _empty_by_label() -> dict:
    return {POSITIVE: Counter(), NEGATIVE: Counter()}


def _zero_by_label() -> dict:
    return {POSITIVE: 0, NEGATIVE: 0}


@dataclass
class CountTable:
    """Trained per-class statistics.

    ``counts`` maps each class to feature counts (only positive counts
    are stored; absence means zero).  ``word_mass`` is the smoothing
    denominator: every count increment adds the same amount to its
    class's mass, so numerator and denominator stay consistent,
    including bootstrapped increments.
    """

    mode: str = BERNOULLI
    counts: dict[str, Counter] = field(default_factory=_empty_by_label)
    word_mass: dict[str, int] = field(default_factory=_zero_by_label)
    doc_count: dict[str, int] = field(default_factory=_zero_by_label)

    def total_count(self, feature: str) -> int:
        return self.counts[POSITIVE].get(feature, 0) + self.counts[NEGATIVE].get(
            feature, 0
        )

    def num_features(self) -> int:
        """Distinct features across both classes."""
        pos, neg = self.counts[POSITIVE], self.counts[NEGATIVE]
        return len(pos) + sum(1 for f in neg if f not in pos)

    def features(self) -> Iterable[str]:
        """Every distinct feature, each exactly once."""
        pos, neg = self.counts[POSITIVE], self.counts[NEGATIVE]
        yield from pos
        for f in neg:
            if f not in pos:
                yield f

    def merge(self, other: "CountTable") -> "CountTable":
        """Combine two disjoint partial tables.

        Associative and commutative on the stored statistics, so
        partition-and-merge training gives the same table as a single
        sequential pass.
        """
        if self.mode != other.mode:
            raise ValueError(f"mode mismatch: {self.mode} vs {other.mode}")
        merged = CountTable(mode=self.mode)
        for label in LABELS:
            combined = Counter(self.counts[label])
            combined.update(other.counts[label])
            merged.counts[label] = combined
            merged.word_mass[label] = self.word_mass[label] + other.word_mass[label]
            merged.doc_count[label] = self.doc_count[label] + other.doc_count[label]
        return merged


def _count_into(
    table: CountTable,
    docs: Iterable["LabeledDoc"],
    pipeline: PipelineConfig,
    mode: str,
    bootstrap: bool,
) -> None:
    counts = table.counts
    word_mass = table.word_mass
    doc_count = table.doc_count
    bernoulli = mode == BERNOULLI
    bootstrap_ngrams = pipeline.bootstrap_ngrams
    for doc in docs:
        label = doc.label
        feats = featurize(doc.text, pipeline, counts=not bernoulli)
        doc_count[label] += 1
        own = counts[label]
        if bernoulli:
            own.update(feats)
            word_mass[label] += len(feats)
            if bootstrap:
                toggled = [
                    toggle_negation(f)
                    for f in feats
                    if bootstrap_ngrams or " " not in f
                ]
                opposite = OPPOSITE[label]
                counts[opposite].update(toggled)
                word_mass[opposite] += len(toggled)
        else:
            own.update(feats)
            word_mass[label] += sum(feats.values())
            if bootstrap:
                opposite = OPPOSITE[label]
                other = counts[opposite]
                mass = 0
                for f, m in feats.items():
                    if bootstrap_ngrams or " " not in f:
                        other[toggle_negation(f)] += m
                        mass += m
                word_mass[opposite] += mass


def _count_chunk(args) -> CountTable:
    docs, pipeline, mode, bootstrap = args
    table = CountTable(mode=mode)
    _count_into(table, docs, pipeline, mode, bootstrap)
    return table


def train(
    docs: Sequence["LabeledDoc"],
    pipeline: PipelineConfig = DEFAULT_CONFIG,
    mode: str = BERNOULLI,
    bootstrap: bool = True,
    workers: int = 1,
) -> CountTable:
    """Single-pass feature counting over a labeled corpus.

    With ``bootstrap`` on, every counted feature also increments its
    negation-toggled form in the opposite class (order-1 features only,
    unless the pipeline sets ``bootstrap_ngrams``).  ``workers`` > 1
    partitions the corpus, counts chunks in subprocesses, and merges
    the partial tables; the result is identical to a sequential pass.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode: {mode!r}")
    docs = list(docs)
    if not docs:
        raise ValueError("empty training set")
    workers = max(1, min(workers, len(docs)))
    if workers == 1:
        table = CountTable(mode=mode)
        _count_into(table, docs, pipeline, mode, bootstrap)
    else:
        step = (len(docs) + workers - 1) // workers
        chunks = [
            (docs[i : i + step], pipeline, mode, bootstrap)
            for i in range(0, len(docs), step)
        ]
        with multiprocessing.Pool(workers) as pool:
            partials = pool.map(_count_chunk, chunks)
        table = partials[0]
        for partial in partials[1:]:
            table = table.merge(partial)
    return table


def smoothed_prob(
    table: CountTable,
    feature: str,
    label: str,
    cfg: SmoothingConfig = DEFAULT_SMOOTHING,
) -> float:
    """Add-k probability of a feature given a class, in linear space.

    Defined as (count + k) / ((k + 1) * word_mass); strictly positive
    for any feature, seen or not.
    """
    mass = table.word_mass[label]
    if mass <= 0:
        raise ValueError(f"empty class: {label!r} has zero word mass")
    return (table.counts[label].get(feature, 0) + cfg.k) / ((cfg.k + 1.0) * mass)


@dataclass
class Model:
    """A finalized classifier: selected counts, priors, scoring tables.

    Immutable after construction; safe to share across workers.  Build
    through :func:`build_model` or :meth:`Model.from_parts`.
    """

    mode: str
    pipeline: PipelineConfig
    smoothing: SmoothingConfig
    denominator_policy: str
    counts: dict[str, dict]
    word_mass: dict[str, int]
    doc_count: dict[str, int]
    priors: dict[str, float]
    log_priors: dict[str, float] = field(repr=False)
    _log_counts: list[float] = field(repr=False)
    _log_denom: dict[str, float] = field(repr=False)

    @property
    def vocabulary(self) -> frozenset:
        """Features the model will score; everything else is skipped."""
        return frozenset(self.counts[POSITIVE]) | frozenset(self.counts[NEGATIVE])

    @classmethod
    def from_parts(
        cls,
        mode: str,
        pipeline: PipelineConfig,
        smoothing: SmoothingConfig,
        denominator_policy: str,
        counts: dict[str, dict],
        word_mass: dict[str, int],
        doc_count: dict[str, int],
        priors: dict[str, float],
    ) -> "Model":
        """Assemble a model and precompute its scoring tables.

        Used by both training and deserialization so that a saved and
        reloaded model performs bit-identical arithmetic.
        """
        if mode not in MODES:
            raise ValueError(f"unknown mode: {mode!r}")
        if denominator_policy not in DENOMINATOR_POLICIES:
            raise ValueError(f"unknown denominator policy: {denominator_policy!r}")
        for label in LABELS:
            if word_mass[label] <= 0:
                raise ValueError(f"empty class: {label!r} has zero word mass")
        total_prior = sum(priors.values())
        if not all(math.isfinite(p) and p > 0 for p in priors.values()):
            raise ValueError(f"invalid class priors: {priors}")
        if abs(total_prior - 1.0) > 1e-9:
            raise ValueError(f"class priors sum to {total_prior}, expected 1")
        log_priors = {label: math.log(priors[label]) for label in LABELS}
        k = smoothing.k
        max_count = 0
        for label in LABELS:
            if counts[label]:
                max_count = max(max_count, max(counts[label].values()))
        log_counts = [math.log(c + k) for c in range(max_count + 1)]
        log_denom = {
            label: math.log((k + 1.0) * word_mass[label]) for label in LABELS
        }
        return cls(
            mode=mode,
            pipeline=pipeline,
            smoothing=smoothing,
            denominator_policy=denominator_policy,
            counts=counts,
            word_mass=word_mass,
            doc_count=doc_count,
            priors=priors,
            log_priors=log_priors,
            _log_counts=log_counts,
            _log_denom=log_denom,
        )


def build_model(
    table: CountTable,
    vocabulary: Iterable[str] | None = None,
    pipeline: PipelineConfig = DEFAULT_CONFIG,
    smoothing: SmoothingConfig = DEFAULT_SMOOTHING,
    denominator_policy: str = FIXED_AT_TRAINING,
) -> Model:
    """Finalize a trained table into a scoring model.

    ``vocabulary=None`` keeps every counted feature.  With an explicit
    vocabulary the stored counts shrink to the selected features; the
    smoothing denominators keep their training-time values unless the
    policy asks for recomputation over the selection.
    """
    n_pos, n_neg = table.doc_count[POSITIVE], table.doc_count[NEGATIVE]
    if n_pos == 0 or n_neg == 0:
        raise ValueError("degenerate class distribution: a class has zero documents")
    if vocabulary is None:
        counts = {label: dict(table.counts[label]) for label in LABELS}
    else:
        vocab = set(vocabulary)
        counts = {
            label: {f: c for f, c in table.counts[label].items() if f in vocab}
            for label in LABELS
        }
    if denominator_policy == RECOMPUTED_OVER_SELECTED:
        word_mass = {label: sum(counts[label].values()) for label in LABELS}
    else:
        word_mass = dict(table.word_mass)
    total = n_pos + n_neg
    priors = {POSITIVE: n_pos / total, NEGATIVE: n_neg / total}
    return Model.from_parts(
        mode=table.mode,
        pipeline=pipeline,
        smoothing=smoothing,
        denominator_policy=denominator_policy,
        counts=counts,
        word_mass=word_mass,
        doc_count=dict(table.doc_count),
        priors=priors,
    )


def log_posterior(model: Model, features) -> dict[str, float]:
    """Per-class unnormalized posterior: log prior plus feature log-likelihoods.

    ``features`` is a set for presence scoring or a mapping
    feature -> multiplicity for multinomial scoring.  Features outside
    the model vocabulary are skipped; the document-evidence term is
    omitted because it is constant across classes.
    """
    pos_counts = model.counts[POSITIVE]
    neg_counts = model.counts[NEGATIVE]
    log_counts = model._log_counts
    pos_denom = model._log_denom[POSITIVE]
    neg_denom = model._log_denom[NEGATIVE]
    score_pos = model.log_priors[POSITIVE]
    score_neg = model.log_priors[NEGATIVE]
    if isinstance(features, Mapping):
        items = features.items()
    else:
        items = ((f, 1) for f in features)
    for f, m in items:
        pc = pos_counts.get(f)
        nc = neg_counts.get(f)
        if pc is None and nc is None:
            continue
        score_pos += m * (log_counts[pc or 0] - pos_denom)
        score_neg += m * (log_counts[nc or 0] - neg_denom)
    return {POSITIVE: score_pos, NEGATIVE: score_neg}


def predict(model: Model, text: str) -> str:
    """Classify raw text; exact score ties resolve to the positive class."""
    feats = featurize(text, model.pipeline, counts=model.mode == MULTINOMIAL)
    scores = log_posterior(model, feats)
    return POSITIVE if scores[POSITIVE] >= scores[NEGATIVE] else NEGATIVE
