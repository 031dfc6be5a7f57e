from itertools import product

import numpy as np
import pytest

from seqrac.classical import (
    ClassicalStrategy,
    classical_frontier,
    constant_strategy,
    majority_strategy,
)


@pytest.fixture(scope="module")
def frontier():
    return classical_frontier()


def test_maxima(frontier):
    assert frontier.max_ab == 0.75
    assert frontier.max_ac == 0.75
    assert frontier.achievable(0.75, 0.75)
    assert not frontier.achievable(0.75 + 1 / 24, 0.5)


def test_pareto_is_single_corner(frontier):
    assert frontier.pareto.tolist() == [[0.75, 0.75]]
    assert frontier.best_ac(0.6) == 0.75
    assert np.isnan(frontier.best_ac(0.8))


def test_scores_are_multiples_of_grid(frontier):
    assert frontier.n_pairs > 1
    assert np.allclose((frontier.pareto[:, 0] * 24) % 1, 0)


def test_named_strategies():
    assert constant_strategy().witnesses() == (0.5, 0.5)
    assert majority_strategy().witnesses() == (0.75, 0.75)


def test_product_decomposition_matches_full_loop_on_one_encoding():
    # independent check: walk every (D, R, G) for the majority encoding
    enc = (np.array(list(product((0, 1), repeat=3))).sum(axis=1) >= 2).astype(int)
    tables = [np.array(t).reshape(2, 3) for t in product((0, 1), repeat=6)]
    relays = [np.array(t).reshape(2, 3, 2) for t in product((0, 1), repeat=12)]
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(3000):
        d = tables[rng.integers(64)]
        r = relays[rng.integers(len(relays))]
        g = tables[rng.integers(64)]
        seen.add(ClassicalStrategy(enc, d, r, g).witnesses())
    for ab, ac in seen:
        assert ab <= 0.75 and ac <= 0.75
    assert (0.75, 0.75) in seen or majority_strategy().witnesses() == (0.75, 0.75)


def test_hull_runs_from_axis_to_corner(frontier):
    assert frontier.hull.tolist() == [[0.5, 0.75], [0.75, 0.75]]
