"""Hypothesis strategies for small dense systems."""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hybridsr.linalg import LinearSystem

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def dominant_systems(draw, min_n=2, max_n=8, margin=0.5):
    """Strictly diagonally dominant systems with a known solution attached."""
    n = draw(st.integers(min_n, max_n))
    a = draw(arrays(np.float64, (n, n), elements=finite))
    off = np.abs(a).sum(axis=1) - np.abs(np.diagonal(a))
    signs = np.where(draw(arrays(np.bool_, n)), 1.0, -1.0)
    np.fill_diagonal(a, signs * (off * (1 + margin) + 1.0))
    x_star = draw(arrays(np.float64, n, elements=finite))
    return LinearSystem(a, a @ x_star), x_star


def random_dominant(rng, n, margin=0.5):
    a = rng.uniform(-10, 10, (n, n))
    off = np.abs(a).sum(axis=1) - np.abs(np.diagonal(a))
    np.fill_diagonal(a, rng.choice([-1.0, 1.0], n) * (off * (1 + margin) + 1.0))
    x_star = rng.uniform(-10, 10, n)
    return LinearSystem(a, a @ x_star), x_star


@st.composite
def vectors(draw, n):
    return draw(arrays(np.float64, n, elements=finite))
