import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# Filled by tests/test_acceptance.py; echoed after the run.
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    """Log one acceptance verdict, print it, and fail the test if it is negative."""
    def _record(number, ok, detail, hard=True):
        verdict = "PASS" if ok else ("FAIL" if hard else "SLOW")
        line = f"{verdict} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        if hard:
            assert ok, line
    return _record
