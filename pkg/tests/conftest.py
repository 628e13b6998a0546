import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "chyp",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("chyp")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line, print it, and fail the test if it did not pass."""
    def record(criterion: int, name: str, passed: bool, summary: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {criterion:2d} {name}: {summary}"
        _VERDICTS.append((criterion, line))
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
