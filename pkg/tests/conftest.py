from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def configs():
    return CONFIGS


ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary prints them in order after the run."""

    def record(number, title, passed, detail):
        ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {title}  ({detail})"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
