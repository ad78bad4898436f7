import numpy as np
import pytest
from hypothesis import strategies as st

from repeaterscope.states import BellDiagonal


@st.composite
def bell_diagonal(draw):
    """Random valid Bell-diagonal state, bounded away from degenerate corners."""
    raw = draw(
        st.lists(
            st.floats(min_value=1e-3, max_value=1.0),
            min_size=4,
            max_size=4,
        )
    )
    total = sum(raw)
    return BellDiagonal(*(x / total for x in raw))


@st.composite
def count_distribution(draw, max_width: int = 12):
    """Random probability vector over small pair counts."""
    width = draw(st.integers(min_value=1, max_value=max_width))
    raw = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0),
            min_size=width,
            max_size=width,
        ).filter(lambda xs: sum(xs) > 1e-6)
    )
    arr = np.asarray(raw)
    return arr / arr.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
