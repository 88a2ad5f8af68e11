import numpy as np
import pytest

from motifrules.series import TimeSeries

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_series(values, period=1.0, name="s"):
    return TimeSeries(np.asarray(values, dtype=float), period=period, name=name)
