import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from costboost.core import Dataset
from costboost.datagen import random_dataset

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def four_points():
    return Dataset(np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([1, 1, -1, -1]))


@pytest.fixture
def noisy40():
    return random_dataset(40, 2, seed=11)


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request, capsys):
    """Report one PASS/FAIL line for an acceptance criterion.

    Call ``criterion(number, text, ok)``; the line goes to stdout and is
    repeated in the terminal summary so it survives output capturing.
    """
    lines = request.config.stash[ACCEPTANCE_KEY]

    def report(number: int, text: str, ok: bool) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
