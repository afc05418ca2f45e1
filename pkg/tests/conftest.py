import numpy as np
import pytest
from hypothesis import strategies as st

from chshlab import BellState, Direction

ALL_STATES = list(BellState)


def random_unit(rng, n=None):
    shape = (3,) if n is None else (n, 3)
    v = rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


angles = st.tuples(
    st.floats(0.0, np.pi, allow_nan=False), st.floats(0.0, 2 * np.pi, exclude_max=True, allow_nan=False)
)
directions = angles.map(lambda t: Direction(*t))
four = st.lists(st.floats(-10, 10, allow_nan=False), min_size=4, max_size=4)
