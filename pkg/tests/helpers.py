import numpy as np
from hypothesis import strategies as st

from seqrac import qubit

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
vectors = st.tuples(finite, finite, finite).map(np.array)


@st.composite
def ball_vectors(draw, radius=1.0):
    v = draw(vectors)
    n = np.linalg.norm(v)
    return v if n <= 1 else v / n * radius


@st.composite
def effects(draw):
    """Random POVM element ``(1 + alpha) I/2 + t.sigma/2`` with ``|t| + |alpha| <= 1``."""
    t = draw(ball_vectors())
    eta = np.linalg.norm(t)
    alpha = draw(st.floats(-(1 - eta), 1 - eta)) if eta < 1 else 0.0
    return qubit.effect_from_params(alpha, t, 0), alpha, t


@st.composite
def matrices(draw):
    entries = draw(st.lists(finite, min_size=8, max_size=8))
    return np.array(entries[:4]).reshape(2, 2) + 1j * np.array(entries[4:]).reshape(2, 2)


def random_effect(rng):
    t = qubit.random_direction(rng) * rng.uniform()
    eta = np.linalg.norm(t)
    alpha = rng.uniform(-(1 - eta), 1 - eta)
    return qubit.effect_from_params(alpha, t, 0)
