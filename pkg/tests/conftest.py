import numpy as np
import pytest
from hypothesis import settings

from idslab.measures import cantor, delta, mixture, uniform

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def measure_zoo():
    """The reference family used by the universal-bound checks."""
    return {
        "delta0": delta(0.0),
        "two-point": mixture((0.5, delta(-1.0)), (0.5, delta(1.0))),
        "unit": uniform(0.0, 1.0),
        "wide": uniform(-2.0, 3.0),
        "cantor": cantor(0.0, 1.0, 1.0 / 3.0, 30),
        "half-atom": mixture((0.5, delta(0.0)), (0.5, uniform(0.0, 1.0))),
    }


@pytest.fixture
def zoo():
    return measure_zoo()


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
