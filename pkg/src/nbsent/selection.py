"""Feature pruning and mutual-information ranking.

Selection works on document-level presence statistics: a feature's
contingency table crosses presence/absence with the two classes, and
features are ranked by the mutual information between those two binary
variables.  Natural log throughout; the base only rescales scores and
the ranking is the sole consumer.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .classifier import (
    BERNOULLI,
    DEFAULT_SMOOTHING,
    FIXED_AT_TRAINING,
    NEGATIVE,
    POSITIVE,
    CountTable,
    SmoothingConfig,
    build_model,
    log_posterior,
)
from .pipeline import DEFAULT_CONFIG, PipelineConfig, featurize

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_KS = (1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000, 256000)


@dataclass(frozen=True)
class ContingencyTable:
    """Document counts crossing feature presence with class polarity.

    First index is presence (1 = present), second is class (1 =
    positive): n11 counts positive documents containing the feature,
    n00 negative documents without it.
    """

    n11: int
    n10: int
    n01: int
    n00: int

    def __post_init__(self) -> None:
        if min(self.n11, self.n10, self.n01, self.n00) < 0:
            raise ValueError("contingency cells must be nonnegative")

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00


@dataclass(frozen=True)
class SelectionConfig:
    min_doc_freq: int = 2
    top_k: int = 32000

    def __post_init__(self) -> None:
        if self.min_doc_freq < 1:
            raise ValueError(f"min_doc_freq must be >= 1, got {self.min_doc_freq}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


class SweepPoint(NamedTuple):
    k: int
    accuracy: float


def _mi_cells(n11: int, n10: int, n01: int, n00: int) -> float:
    # Integer shortcut makes independence an exact zero instead of a
    # float residue; cross-product equality characterizes independence
    # for 2x2 tables.
    if n11 * n00 == n10 * n01:
        return 0.0
    present = n11 + n10
    absent = n01 + n00
    pos = n11 + n01
    neg = n10 + n00
    total = present + absent
    log = math.log
    acc = 0.0
    if n11:
        acc += n11 * log(n11 * total / (present * pos))
    if n10:
        acc += n10 * log(n10 * total / (present * neg))
    if n01:
        acc += n01 * log(n01 * total / (absent * pos))
    if n00:
        acc += n00 * log(n00 * total / (absent * neg))
    # Mathematically nonnegative; guard the float residue near zero.
    return max(0.0, acc / total)


def mutual_information(ct: ContingencyTable) -> float:
    """Mutual information of feature presence and class, in nats.

    Cell probabilities are maximum-likelihood (n / N) and empty cells
    contribute zero.  Always nonnegative; exactly zero when presence
    and class are independent.
    """
    if ct.total == 0:
        raise ValueError("empty contingency table")
    return _mi_cells(ct.n11, ct.n10, ct.n01, ct.n00)


def prune_singletons(table: CountTable, min_doc_freq: int = 2) -> CountTable:
    """Drop features whose document frequency summed over both classes
    is below the threshold.

    Word masses and document counts keep their training-time values;
    whether denominators ever reflect a reduced vocabulary is the model
    builder's denominator policy, not the pruner's business.
    """
    if table.mode != BERNOULLI:
        raise ValueError("singleton pruning needs document frequencies (bernoulli mode)")
    pos, neg = table.counts[POSITIVE], table.counts[NEGATIVE]
    kept_pos = {f: c for f, c in pos.items() if c + neg.get(f, 0) >= min_doc_freq}
    kept_neg = {f: c for f, c in neg.items() if c + pos.get(f, 0) >= min_doc_freq}
    pruned = CountTable(mode=table.mode)
    pruned.counts[POSITIVE].update(kept_pos)
    pruned.counts[NEGATIVE].update(kept_neg)
    pruned.word_mass = dict(table.word_mass)
    pruned.doc_count = dict(table.doc_count)
    return pruned


def contingency_for(table: CountTable, feature: str) -> ContingencyTable:
    """Presence/class contingency of one feature from a bernoulli table.

    Bootstrapped increments count as presence like real ones; since
    they can push a count past the class's document total, presence
    cells are capped there to keep the table consistent.
    """
    n_pos = table.doc_count[POSITIVE]
    n_neg = table.doc_count[NEGATIVE]
    n11 = min(table.counts[POSITIVE].get(feature, 0), n_pos)
    n10 = min(table.counts[NEGATIVE].get(feature, 0), n_neg)
    return ContingencyTable(n11=n11, n10=n10, n01=n_pos - n11, n00=n_neg - n10)


def rank_features(table: CountTable) -> list[str]:
    """All features of the table, best-first by mutual information.

    Ties break by higher total document frequency, then lexicographic
    feature text, so the ranking is deterministic.
    """
    n_pos = table.doc_count[POSITIVE]
    n_neg = table.doc_count[NEGATIVE]
    pos, neg = table.counts[POSITIVE], table.counts[NEGATIVE]
    scored = []
    for f in table.features():
        pc = pos.get(f, 0)
        nc = neg.get(f, 0)
        n11 = min(pc, n_pos)
        n10 = min(nc, n_neg)
        mi = _mi_cells(n11, n10, n_pos - n11, n_neg - n10)
        scored.append((-mi, -(pc + nc), f))
    scored.sort()
    return [f for _, _, f in scored]


def select_top_k(table: CountTable, cfg: SelectionConfig = SelectionConfig()) -> set[str]:
    """The ``cfg.top_k`` features with maximum mutual information.

    Expects a pruned table.  Asking for more features than survive
    returns them all with a warning.
    """
    ranked = rank_features(table)
    if cfg.top_k >= len(ranked):
        if cfg.top_k > len(ranked):
            logger.warning(
                "top_k=%d exceeds surviving vocabulary (%d); keeping all features",
                cfg.top_k,
                len(ranked),
            )
        return set(ranked)
    return set(ranked[: cfg.top_k])


def sweep_k(
    table: CountTable,
    validation: Sequence,
    ks: Sequence[int],
    pipeline: PipelineConfig = DEFAULT_CONFIG,
    smoothing: SmoothingConfig = DEFAULT_SMOOTHING,
    denominator_policy: str = FIXED_AT_TRAINING,
) -> list[SweepPoint]:
    """Validation accuracy as a function of the number of kept features.

    Ranks once, then evaluates each k against a model restricted to the
    top-k prefix.  Validation documents must be disjoint from the
    table's training documents for the curve to mean anything.
    """
    validation = list(validation)
    if not validation:
        raise ValueError("empty validation set")
    ranked = rank_features(table)
    multinomial = table.mode != BERNOULLI
    featurized = [
        (featurize(doc.text, pipeline, counts=multinomial), doc.label)
        for doc in validation
    ]
    points = []
    for k in ks:
        model = build_model(
            table,
            vocabulary=ranked[:k],
            pipeline=pipeline,
            smoothing=smoothing,
            denominator_policy=denominator_policy,
        )
        correct = 0
        for feats, label in featurized:
            scores = log_posterior(model, feats)
            predicted = POSITIVE if scores[POSITIVE] >= scores[NEGATIVE] else NEGATIVE
            if predicted == label:
                correct += 1
        points.append(SweepPoint(k=k, accuracy=correct / len(featurized)))
    return points
