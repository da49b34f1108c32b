import numpy as np
import pytest
from hypothesis import strategies as st

from circle_isometries.circle import Rotation, SineShear, compose, conj, inverse, power

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture
def golden_conj():
    """``h o R_golden o h^-1`` with ``h = shear:0.5:1``."""
    return conj(SineShear(0.5, 1), Rotation(GOLDEN))


rotations = st.floats(-2.0, 2.0, allow_nan=False).map(Rotation)
shears = st.builds(SineShear, st.floats(-0.7, 0.7), st.integers(1, 3))
primitives = st.one_of(rotations, shears)


@st.composite
def diffeo_trees(draw, depth=2):
    if depth == 0:
        return draw(primitives)
    op = draw(st.sampled_from(["leaf", "comp", "inv", "pow", "conj"]))
    if op == "leaf":
        return draw(primitives)
    a = draw(diffeo_trees(depth - 1))
    if op == "inv":
        return inverse(a)
    if op == "pow":
        return power(a, draw(st.integers(-2, 2)))
    b = draw(diffeo_trees(depth - 1))
    return compose(a, b) if op == "comp" else conj(a, b)
