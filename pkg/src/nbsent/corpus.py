"""IMDB review corpus loading, train/validation splitting, evaluation.

Expects the standard aclImdb directory layout::

    <root>/train/pos/*.txt   <root>/train/neg/*.txt
    <root>/test/pos/*.txt    <root>/test/neg/*.txt

Files are read as UTF-8 with invalid byte sequences replaced (the
corpus contains a few stray bytes).  Loading order is deterministic:
documents sort by their id, which is the label directory plus filename.
"""

from __future__ import annotations

import logging
import multiprocessing
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from random import Random
from typing import Sequence

from .classifier import LABELS, NEGATIVE, POSITIVE, Model, predict

logger = logging.getLogger(__name__)

_LABEL_DIRS = ((POSITIVE, "pos"), (NEGATIVE, "neg"))


class DataError(Exception):
    """Dataset layout or content problem."""


@dataclass(frozen=True)
class LabeledDoc:
    id: str
    text: str
    label: str


@dataclass
class EvalReport:
    """Classification quality plus run measurements.

    ``confusion`` rows are gold labels, columns predictions, both in
    (positive, negative) order.  ``peak_memory_bytes`` is a best-effort
    process high-water mark, informational only.
    """

    accuracy: float
    confusion: list = field(default_factory=lambda: [[0, 0], [0, 0]])
    n_docs: int = 0
    wall_time_seconds: float = 0.0
    peak_memory_bytes: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def peak_memory_bytes() -> int:
    """Process peak RSS in bytes, or 0 where unavailable."""
    try:
        import resource
    except ImportError:  # non-POSIX
        return 0
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    if sys.platform == "darwin":
        return int(peak)
    return int(peak) * 1024


def load_split(root, split: str) -> list[LabeledDoc]:
    """All documents of one split, labeled by directory, sorted by id."""
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    base = Path(root) / split
    docs: list[LabeledDoc] = []
    for label, dirname in _LABEL_DIRS:
        class_dir = base / dirname
        if not class_dir.is_dir():
            raise DataError(f"missing directory: {class_dir}")
        files = sorted(p for p in class_dir.iterdir() if p.name.endswith(".txt"))
        if not files:
            raise DataError(f"no review files in {class_dir}")
        for path in files:
            text = path.read_text(encoding="utf-8", errors="replace")
            if not text.strip():
                logger.warning("skipping empty review file: %s", path)
                continue
            docs.append(LabeledDoc(id=f"{dirname}/{path.name}", text=text, label=label))
    docs.sort(key=lambda d: d.id)
    return docs


def split_validation(
    train: Sequence[LabeledDoc], n: int, seed: int = 42
) -> tuple[list[LabeledDoc], list[LabeledDoc]]:
    """Hold out a class-balanced validation sample of n documents.

    A seeded shuffle per class makes the split reproducible; the
    remaining training documents keep their original order.  n must be
    even so both classes contribute n/2 documents.
    """
    train = list(train)
    if n == 0:
        return train, []
    if n < 0 or n % 2 != 0:
        raise ValueError(f"validation size must be even and nonnegative, got {n}")
    if n > len(train):
        raise ValueError(f"validation size {n} exceeds corpus size {len(train)}")
    half = n // 2
    rng = Random(seed)
    validation: list[LabeledDoc] = []
    for label in LABELS:
        class_docs = [d for d in train if d.label == label]
        if half > len(class_docs):
            raise ValueError(
                f"validation needs {half} documents of class {label!r}, "
                f"corpus has {len(class_docs)}"
            )
        rng.shuffle(class_docs)
        validation.extend(class_docs[:half])
    held_out = {d.id for d in validation}
    remaining = [d for d in train if d.id not in held_out]
    return remaining, validation


_EVAL_MODEL: Model | None = None


def _eval_init(model: Model) -> None:
    global _EVAL_MODEL
    _EVAL_MODEL = model


def _eval_chunk(texts: list[str]) -> list[str]:
    return [predict(_EVAL_MODEL, text) for text in texts]


def evaluate(model: Model, docs: Sequence[LabeledDoc], workers: int = 1) -> EvalReport:
    """Classify every document and report accuracy and confusion counts.

    ``workers`` > 1 classifies in parallel processes against the shared
    immutable model; the aggregation is order-independent.
    """
    docs = list(docs)
    if not docs:
        raise ValueError("no documents to evaluate")
    index = {POSITIVE: 0, NEGATIVE: 1}
    confusion = [[0, 0], [0, 0]]
    start = time.perf_counter()
    workers = max(1, min(workers, len(docs)))
    if workers == 1:
        predictions = [predict(model, doc.text) for doc in docs]
    else:
        step = (len(docs) + workers - 1) // workers
        chunks = [[d.text for d in docs[i : i + step]] for i in range(0, len(docs), step)]
        with multiprocessing.Pool(workers, initializer=_eval_init, initargs=(model,)) as pool:
            predictions = [p for chunk in pool.map(_eval_chunk, chunks) for p in chunk]
    elapsed = time.perf_counter() - start
    for doc, predicted in zip(docs, predictions):
        confusion[index[doc.label]][index[predicted]] += 1
    correct = confusion[0][0] + confusion[1][1]
    return EvalReport(
        accuracy=correct / len(docs),
        confusion=confusion,
        n_docs=len(docs),
        wall_time_seconds=elapsed,
        peak_memory_bytes=peak_memory_bytes(),
    )
