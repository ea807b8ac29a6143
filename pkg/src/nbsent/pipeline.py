"""Text-to-feature pipeline: tokenization, negation marking, n-grams.

Raw review text passes through three stages:

1. ``tokenize`` strips HTML line breaks, lowercases, and splits the text
   into word tokens and sentence punctuation.
2. ``apply_negation`` rewrites every token inside a negation scope to a
   ``not_``-prefixed form.  A single boolean state toggles after each
   negator word (so double negation cancels) and clears at punctuation.
3. ``ngrams`` expands token runs into word n-grams up to order 3.

``featurize`` composes the three stages and is the entry point the
classifier uses.  All functions here are pure; they can be called from
any number of workers without shared state.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

NEGATION_PREFIX = "not_"
_PREFIX_LEN = len(NEGATION_PREFIX)

DEFAULT_NEGATORS = frozenset({"not", "n't", "no", "never"})
DEFAULT_RESET_PUNCTUATION = frozenset({".", ",", "!", "?", ";", ":"})

_BR_TAG_RE = re.compile(r"<br\s*/?>", re.IGNORECASE)
# Word tokens are alphanumeric runs (underscore excluded) with internal
# apostrophes; any other non-space symbol surfaces as a single-character
# candidate punctuation token.
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*|[^\w\s]")


@dataclass(frozen=True)
class PipelineConfig:
    """Feature-extraction settings.

    ``bootstrap_ngrams`` decides whether features of order > 1 also get
    bootstrapped negated counts during training; by default only
    unigrams do.
    """

    n_max: int = 3
    negator_words: frozenset[str] = DEFAULT_NEGATORS
    reset_punctuation: frozenset[str] = DEFAULT_RESET_PUNCTUATION
    lowercase: bool = True
    bootstrap_ngrams: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.n_max <= 3:
            raise ValueError(f"n_max must be in [1, 3], got {self.n_max}")


DEFAULT_CONFIG = PipelineConfig()


def tokenize(text: str, config: PipelineConfig = DEFAULT_CONFIG) -> list[str]:
    """Split raw text into word and punctuation tokens.

    Words are alphanumeric runs keeping internal apostrophes;
    contractions ending in "n't" split into stem plus "n't" (so
    "isn't" becomes "is", "n't").  Characters from
    ``config.reset_punctuation`` come out as standalone tokens; every
    other symbol is dropped.  ``<br />`` markup is removed first.
    """
    if not text:
        return []
    text = _BR_TAG_RE.sub(" ", text)
    if config.lowercase:
        text = text.lower()
    keep_punct = config.reset_punctuation
    out: list[str] = []
    append = out.append
    for tok in _TOKEN_RE.findall(text):
        if len(tok) == 1 and not tok.isalnum():
            if tok in keep_punct:
                append(tok)
        elif tok.endswith("n't") and len(tok) > 3:
            append(tok[:-3])
            append("n't")
        else:
            append(tok)
    return out


def negated_segments(
    tokens: Sequence[str], config: PipelineConfig = DEFAULT_CONFIG
) -> list[list[str]]:
    """Negation-transform tokens and split them at punctuation resets.

    Returns punctuation-free token runs; n-gram windows may be taken
    within a run but never across runs, so clause boundaries are never
    bridged.
    """
    negators = config.negator_words
    resets = config.reset_punctuation
    segments: list[list[str]] = []
    current: list[str] = []
    negated = False
    for tok in tokens:
        if tok in resets:
            negated = False
            if current:
                segments.append(current)
                current = []
            continue
        current.append(NEGATION_PREFIX + tok if negated else tok)
        if tok in negators:
            negated = not negated
    if current:
        segments.append(current)
    return segments


def apply_negation(
    tokens: Sequence[str], config: PipelineConfig = DEFAULT_CONFIG
) -> list[str]:
    """Rewrite tokens in negation scope to "not_"-prefixed forms.

    Each token is emitted first (prefixed when the state is set), then
    the state toggles if the original token is a negator word; reset
    punctuation clears the state and is suppressed from the output.
    The emit-then-toggle order means a negator under an active state
    itself becomes a "not_not" feature.
    """
    out: list[str] = []
    for segment in negated_segments(tokens, config):
        out.extend(segment)
    return out


def ngrams(tokens: Sequence[str], n_max: int) -> list[str]:
    """All contiguous n-grams of order 1..n_max, grouped by order.

    Higher-order grams join their tokens with a single space.  The
    input run must not contain reset boundaries (``featurize`` handles
    segmentation before calling this).
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    grams = list(tokens)
    m = len(tokens)
    for n in range(2, n_max + 1):
        for i in range(m - n + 1):
            grams.append(" ".join(tokens[i : i + n]))
    return grams


def featurize(
    text: str,
    config: PipelineConfig = DEFAULT_CONFIG,
    counts: bool = False,
) -> set[str] | Counter[str]:
    """Full pipeline: tokenize, negate, n-grams, deduplicate.

    Returns the document's unique feature set.  With ``counts=True``
    returns a Counter keyed by feature instead (the multinomial
    variant, which keeps occurrence multiplicities).
    """
    segments = negated_segments(tokenize(text, config), config)
    n_max = config.n_max
    if counts:
        bag: Counter[str] = Counter()
        for segment in segments:
            bag.update(ngrams(segment, n_max))
        return bag
    feats: set[str] = set()
    for segment in segments:
        feats.update(ngrams(segment, n_max))
    return feats


def toggle_negation(feature: str) -> str:
    """Flip the "not_" prefix on every token position of the feature.

    An involution on well-formed features (at most one prefix per
    token): applying it twice returns the original feature.
    """
    if " " not in feature:
        if feature.startswith(NEGATION_PREFIX):
            return feature[_PREFIX_LEN:]
        return NEGATION_PREFIX + feature
    return " ".join(
        tok[_PREFIX_LEN:] if tok.startswith(NEGATION_PREFIX) else NEGATION_PREFIX + tok
        for tok in feature.split(" ")
    )


def feature_order(feature: str) -> int:
    """N-gram order of a feature: 1 + number of space separators."""
    return feature.count(" ") + 1
