import numpy as np
import pytest

from kakforge.rng import SplitMix64


@pytest.fixture
def rng():
    return SplitMix64(20240611)


def haar(n: int, seed: int) -> np.ndarray:
    return SplitMix64(seed).unitary(1 << n)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
