import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from failprop.lpv import baseline_lpv_model, hardened_lpv_model  # noqa: E402

# criterion number -> (title, passed, detail); filled by test_acceptance
CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture(scope="session")
def baseline():
    return baseline_lpv_model()


@pytest.fixture(scope="session")
def hardened():
    return hardened_lpv_model()


@pytest.fixture
def record():
    def _record(number: int, title: str, passed: bool, detail: str = ""):
        CRITERIA[number] = (title, bool(passed), detail)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, passed, detail = CRITERIA[n]
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {n}: {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
