import numpy as np
import pytest
from hypothesis import strategies as st

from depvi.vehicle import VehicleParams, default_initial_state


@pytest.fixture
def params():
    return VehicleParams()


@pytest.fixture
def initial():
    return default_initial_state()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
vectors = st.tuples(finite, finite, finite).map(np.array)
small = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
small_vectors = st.tuples(small, small, small).map(np.array)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
