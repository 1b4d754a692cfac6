import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def enumerate_singletons(g, l):
    """Distribution of the singleton-bin count over all l**g assignments."""
    counts = {}
    for picks in itertools.product(range(l), repeat=g):
        s = sum(1 for b in range(l) if picks.count(b) == 1)
        counts[s] = counts.get(s, 0) + 1
    return {s: c / l**g for s, c in counts.items()}


@pytest.fixture
def singleton_oracle():
    return enumerate_singletons


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_report():
    """Record the verdict line for one acceptance criterion."""

    def record(number, passed, detail):
        _ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
