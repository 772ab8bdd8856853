import sys
import zlib
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: list[tuple[str, bool, str]] = []


class CriterionLog:
    """Records one pass/fail line per acceptance criterion."""

    def __call__(self, name: str, passed: bool, detail: str = "") -> bool:
        line = f"{name}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
        print(line)
        _CRITERIA.append((name, passed, detail))
        return passed


@pytest.fixture
def criterion():
    return CriterionLog()


@pytest.fixture
def rng(request):
    # per-test stream keyed on the test name so tests stay independent of run order
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(
            f"{name}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
        )
