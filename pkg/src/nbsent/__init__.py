"""Naive Bayes sentiment classification with negation handling,
word n-grams, and mutual-information feature selection."""

from .classifier import (
    BERNOULLI,
    FIXED_AT_TRAINING,
    MULTINOMIAL,
    NEGATIVE,
    POSITIVE,
    RECOMPUTED_OVER_SELECTED,
    CountTable,
    Model,
    SmoothingConfig,
    build_model,
    log_posterior,
    predict,
    smoothed_prob,
    train,
)
from .corpus import (
    DataError,
    EvalReport,
    LabeledDoc,
    evaluate,
    load_split,
    split_validation,
)
from .pipeline import (
    DEFAULT_NEGATORS,
    DEFAULT_RESET_PUNCTUATION,
    NEGATION_PREFIX,
    PipelineConfig,
    apply_negation,
    featurize,
    negated_segments,
    ngrams,
    toggle_negation,
    tokenize,
)
from .selection import (
    DEFAULT_SWEEP_KS,
    ContingencyTable,
    SelectionConfig,
    SweepPoint,
    contingency_for,
    mutual_information,
    prune_singletons,
    rank_features,
    select_top_k,
    sweep_k,
)
from .store import ModelFormatError, load, save

__version__ = "0.1.0"

__all__ = [
    "BERNOULLI",
    "MULTINOMIAL",
    "POSITIVE",
    "NEGATIVE",
    "FIXED_AT_TRAINING",
    "RECOMPUTED_OVER_SELECTED",
    "NEGATION_PREFIX",
    "DEFAULT_NEGATORS",
    "DEFAULT_RESET_PUNCTUATION",
    "DEFAULT_SWEEP_KS",
    "PipelineConfig",
    "SmoothingConfig",
    "SelectionConfig",
    "ContingencyTable",
    "CountTable",
    "Model",
    "LabeledDoc",
    "EvalReport",
    "SweepPoint",
    "DataError",
    "ModelFormatError",
    "tokenize",
    "negated_segments",
    "apply_negation",
    "toggle_negation",
    "ngrams",
    "featurize",
    "train",
    "build_model",
    "smoothed_prob",
    "log_posterior",
    "predict",
    "mutual_information",
    "contingency_for",
    "prune_singletons",
    "rank_features",
    "select_top_k",
    "sweep_k",
    "load_split",
    "split_validation",
    "evaluate",
    "load",
    "save",
]
