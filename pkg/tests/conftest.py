"""Shared fixtures plus the acceptance-criteria summary hook.

test_acceptance.py records one (number, description, ok, detail) tuple per
criterion through the `acceptance` fixture; after the run we print a single
PASS/FAIL line for each so the final report is readable at a glance.
"""

import numpy as np
import pytest

ACCEPTANCE_KEY = pytest.StashKey()


@pytest.fixture
def acceptance(request):
    log = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(num, desc, ok, detail=""):
        log.append((num, desc, bool(ok), str(detail)))
        assert ok, f"criterion {num} failed: {desc} ({detail})"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_KEY, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(log):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}: {desc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
