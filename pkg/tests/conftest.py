import numpy as np
import pytest

from nhflip.experiment import get_preset
from nhflip.runner import run_experiment

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def preset_result():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = run_experiment(get_preset(name))
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(name: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
