from fractions import Fraction

import pytest
from hypothesis import strategies as st

from ikplab.core import make_instance


@st.composite
def instances(draw, max_n=6, max_T=3, weight_constrained=False, max_mult=3):
    n = draw(st.integers(1, max_n))
    T = draw(st.integers(1, max_T))
    w = draw(st.lists(st.integers(1, 12), min_size=n, max_size=n))
    p = draw(st.lists(st.integers(1, 12), min_size=n, max_size=n))
    d = draw(st.lists(st.integers(1, max_mult), min_size=T, max_size=T))
    caps = sorted(draw(st.lists(st.integers(1, sum(w) + 2), min_size=T, max_size=T)))
    if weight_constrained:
        caps = [max(c, max(w)) for c in caps]
    return make_instance(p, w, caps, d)


@pytest.fixture
def unit_example():
    """n=6 unit items, capacities 2, 3, 6, unit multipliers."""
    return make_instance([1] * 6, [1] * 6, [2, 3, 6])


@pytest.fixture
def F():
    return Fraction
