import os
import re

import pytest

from nbsent.classifier import SmoothingConfig, build_model, train
from nbsent.corpus import load_split
from nbsent.pipeline import PipelineConfig
from nbsent.selection import SelectionConfig, prune_singletons, select_top_k

FIXTURE_ROOT = os.path.join(os.path.dirname(__file__), "fixtures", "mini_imdb")

# One line per acceptance criterion, printed in the terminal summary so the
# pass/fail table is visible without -s.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    def _record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"{criterion}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    skipped = terminalreporter.stats.get("skipped", [])
    skip_lines = []
    for report in skipped:
        if "test_acceptance.py" not in report.nodeid:
            continue
        match = re.search(r"test_c(\d+)", report.nodeid)
        if not match:
            continue
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else ""
        reason = str(reason).removeprefix("Skipped: ")
        skip_lines.append(f"C{int(match.group(1)):02d} SKIP  {reason}")
    if not ACCEPTANCE_LINES and not skip_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES + skip_lines):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixture_root():
    return FIXTURE_ROOT


@pytest.fixture(scope="session")
def fixture_train(fixture_root):
    return load_split(fixture_root, "train")


@pytest.fixture(scope="session")
def fixture_test(fixture_root):
    return load_split(fixture_root, "test")


@pytest.fixture(scope="session")
def fixture_model(fixture_train):
    """Full-pipeline model trained on the committed mini corpus."""
    pipeline = PipelineConfig()
    table = train(fixture_train, pipeline)
    pruned = prune_singletons(table, 2)
    vocabulary = select_top_k(pruned, SelectionConfig(min_doc_freq=2, top_k=64))
    return build_model(pruned, vocabulary, pipeline, SmoothingConfig())
