"""Model persistence: the NBSENT v1 text format.

Layout, one record per line, tab-separated::

    NBSENT 1
    <key>\\t<value>              # config lines, fixed order
    features\\t<record count>
    <feature>\\t<pos>\\t<neg>    # records sorted by feature text

Feature text escapes backslash, tab, and newline (``\\\\``, ``\\t``,
``\\n``); counts are decimal integers, and zero counts are stored
explicitly in records but never materialized on load.  Saving is
canonical: the same model always produces byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

from .classifier import (
    LABELS,
    MODES,
    NEGATIVE,
    POSITIVE,
    DENOMINATOR_POLICIES,
    Model,
    SmoothingConfig,
)
from .pipeline import PipelineConfig

MAGIC = "NBSENT"
VERSION = 1

_CONFIG_KEYS = (
    "mode",
    "denominator_policy",
    "smoothing_k",
    "n_max",
    "lowercase",
    "negators",
    "reset_punct",
    "bootstrap_ngrams",
    "prior_pos",
    "prior_neg",
    "word_mass_pos",
    "word_mass_neg",
    "doc_count_pos",
    "doc_count_neg",
)


class ModelFormatError(Exception):
    """Unreadable or inconsistent model file."""


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            elif nxt == "\\":
                out.append("\\")
            else:
                out.append(nxt)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def save(model: Model, path) -> None:
    """Write the model to ``path`` in canonical NBSENT v1 form."""
    config = {
        "mode": model.mode,
        "denominator_policy": model.denominator_policy,
        "smoothing_k": repr(model.smoothing.k),
        "n_max": str(model.pipeline.n_max),
        "lowercase": "1" if model.pipeline.lowercase else "0",
        "negators": " ".join(sorted(model.pipeline.negator_words)),
        "reset_punct": "".join(sorted(model.pipeline.reset_punctuation)),
        "bootstrap_ngrams": "1" if model.pipeline.bootstrap_ngrams else "0",
        "prior_pos": repr(model.priors[POSITIVE]),
        "prior_neg": repr(model.priors[NEGATIVE]),
        "word_mass_pos": str(model.word_mass[POSITIVE]),
        "word_mass_neg": str(model.word_mass[NEGATIVE]),
        "doc_count_pos": str(model.doc_count[POSITIVE]),
        "doc_count_neg": str(model.doc_count[NEGATIVE]),
    }
    pos_counts = model.counts[POSITIVE]
    neg_counts = model.counts[NEGATIVE]
    vocabulary = sorted(model.vocabulary)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{MAGIC} {VERSION}\n")
        for key in _CONFIG_KEYS:
            fh.write(f"{key}\t{config[key]}\n")
        fh.write(f"features\t{len(vocabulary)}\n")
        for feature in vocabulary:
            fh.write(
                f"{_escape(feature)}\t{pos_counts.get(feature, 0)}"
                f"\t{neg_counts.get(feature, 0)}\n"
            )


def _parse_int(value: str, key: str, line_no: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ModelFormatError(f"line {line_no}: {key} is not an integer: {value!r}")


def _parse_float(value: str, key: str, line_no: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ModelFormatError(f"line {line_no}: {key} is not a number: {value!r}")


def load(path) -> Model:
    """Read a model saved by :func:`save` and rebuild its scoring state."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="\n") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelFormatError("unsupported model file: empty")
    header = lines[0].split(" ")
    if len(header) != 2 or header[0] != MAGIC or header[1] != str(VERSION):
        raise ModelFormatError(f"unsupported model file: bad header {lines[0]!r}")

    config: dict[str, str] = {}
    line_no = 1
    for key in _CONFIG_KEYS:
        line_no += 1
        if line_no > len(lines):
            raise ModelFormatError(f"line {line_no}: missing config key {key!r}")
        parts = lines[line_no - 1].split("\t")
        if len(parts) != 2 or parts[0] != key:
            raise ModelFormatError(
                f"line {line_no}: expected config key {key!r}, got {lines[line_no - 1]!r}"
            )
        config[key] = parts[1]

    line_no += 1
    if line_no > len(lines):
        raise ModelFormatError(f"line {line_no}: missing feature count")
    parts = lines[line_no - 1].split("\t")
    if len(parts) != 2 or parts[0] != "features":
        raise ModelFormatError(
            f"line {line_no}: expected feature count, got {lines[line_no - 1]!r}"
        )
    n_features = _parse_int(parts[1], "features", line_no)

    mode = config["mode"]
    if mode not in MODES:
        raise ModelFormatError(f"unknown mode: {mode!r}")
    policy = config["denominator_policy"]
    if policy not in DENOMINATOR_POLICIES:
        raise ModelFormatError(f"unknown denominator policy: {policy!r}")
    k = _parse_float(config["smoothing_k"], "smoothing_k", 0)
    if k <= 0:
        raise ModelFormatError(f"smoothing_k must be positive, got {k}")
    n_max = _parse_int(config["n_max"], "n_max", 0)
    pipeline = PipelineConfig(
        n_max=n_max,
        negator_words=frozenset(config["negators"].split()),
        reset_punctuation=frozenset(config["reset_punct"]),
        lowercase=config["lowercase"] == "1",
        bootstrap_ngrams=config["bootstrap_ngrams"] == "1",
    )
    priors = {
        POSITIVE: _parse_float(config["prior_pos"], "prior_pos", 0),
        NEGATIVE: _parse_float(config["prior_neg"], "prior_neg", 0),
    }
    word_mass = {
        POSITIVE: _parse_int(config["word_mass_pos"], "word_mass_pos", 0),
        NEGATIVE: _parse_int(config["word_mass_neg"], "word_mass_neg", 0),
    }
    doc_count = {
        POSITIVE: _parse_int(config["doc_count_pos"], "doc_count_pos", 0),
        NEGATIVE: _parse_int(config["doc_count_neg"], "doc_count_neg", 0),
    }
    if abs(sum(priors.values()) - 1.0) > 1e-9 or not all(
        math.isfinite(p) and p > 0 for p in priors.values()
    ):
        raise ModelFormatError(f"invalid class priors: {priors}")
    for label in LABELS:
        if word_mass[label] < 0 or doc_count[label] < 0:
            raise ModelFormatError("word masses and document counts must be nonnegative")

    counts: dict[str, dict] = {POSITIVE: {}, NEGATIVE: {}}
    first_record = line_no + 1
    for offset in range(n_features):
        record_no = first_record + offset
        if record_no > len(lines):
            raise ModelFormatError(
                f"line {record_no}: truncated file, expected {n_features} feature records"
            )
        parts = lines[record_no - 1].split("\t")
        if len(parts) != 3:
            raise ModelFormatError(
                f"line {record_no}: malformed feature record {lines[record_no - 1]!r}"
            )
        feature = _unescape(parts[0])
        pos_count = _parse_int(parts[1], "pos count", record_no)
        neg_count = _parse_int(parts[2], "neg count", record_no)
        if pos_count < 0 or neg_count < 0:
            raise ModelFormatError(f"line {record_no}: negative count")
        if pos_count:
            counts[POSITIVE][feature] = pos_count
        if neg_count:
            counts[NEGATIVE][feature] = neg_count
    if len(lines) > first_record + n_features - 1:
        raise ModelFormatError(
            f"line {first_record + n_features}: trailing data after feature records"
        )

    try:
        return Model.from_parts(
            mode=mode,
            pipeline=pipeline,
            smoothing=SmoothingConfig(k=k),
            denominator_policy=policy,
            counts=counts,
            word_mass=word_mass,
            doc_count=doc_count,
            priors=priors,
        )
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
