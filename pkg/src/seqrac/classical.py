"""Exhaustive search over deterministic one-bit classical strategies.

Alice sends one bit ``m = E(x)``.  Bob outputs ``b = D(m, y)`` and forwards a
bit ``m' = R(m, y, b)``; Charlie outputs ``c = G(m', z)``.  Because ``b`` is
itself a function of ``(m, y)``, every relay reduces to a table ``(m, y) ->
m'``, so for a fixed encoding Bob's score depends only on ``D`` and Charlie's
only on ``(R, G)``.  The achievable set for one encoding is therefore the
Cartesian product of the two score sets and the whole enumeration costs
``256 * (64 + 64 * 64)`` table lookups.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .scenario import X_BITS

# every map {0,1} x {0,1,2} -> {0,1}, indexed [table, m, y]
_TABLES = np.array(list(product((0, 1), repeat=6)), dtype=int).reshape(64, 2, 3)
_ENCODINGS = np.array(list(product((0, 1), repeat=8)), dtype=int)


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic tables; ``relay[m, y, b]`` and the others as named."""

    encoding: np.ndarray  # (8,)
    bob_decoding: np.ndarray  # (2, 3)
    bob_relay: np.ndarray  # (2, 3, 2)
    charlie_decoding: np.ndarray  # (2, 3)

    def witnesses(self) -> tuple[float, float]:
        ab = ac = 0
        for x in range(8):
            m = self.encoding[x]
            for y in range(3):
                b = self.bob_decoding[m, y]
                ab += b == X_BITS[x, y]
                m2 = self.bob_relay[m, y, b]
                for z in range(3):
                    ac += self.charlie_decoding[m2, z] == X_BITS[x, z]
        return ab / 24, ac / 72


@dataclass(frozen=True)
class ClassicalFrontier:
    pareto: np.ndarray  # (k, 2) rows (a_ab, a_ac), sorted by a_ab
    hull: np.ndarray  # vertices of the decreasing upper hull, from the A_AC axis
    max_ab: float
    max_ac: float
    n_pairs: int

    def achievable(self, a_ab: float, a_ac: float, tol: float = 1e-12) -> bool:
        """Is ``(a_ab, a_ac)`` dominated by some deterministic strategy?"""
        return bool(np.any((self.pareto[:, 0] >= a_ab - tol) & (self.pareto[:, 1] >= a_ac - tol)))

    def best_ac(self, a_ab: float) -> float:
        """Largest deterministic ``A_AC`` among strategies with ``A_AB >= a_ab``."""
        ok = self.pareto[:, 0] >= a_ab - 1e-12
        return float(self.pareto[ok, 1].max()) if ok.any() else float("nan")


def _bob_scores(enc: np.ndarray) -> np.ndarray:
    # hits[t] = number of (x, y) with D_t(enc(x), y) == x_y
    guesses = _TABLES[:, enc, :]  # (64, 8, 3)
    return (guesses == X_BITS[None]).sum(axis=(1, 2))


def _charlie_scores(enc: np.ndarray) -> np.ndarray:
    relayed = _TABLES[:, enc, :]  # (64 relays, 8 x, 3 y) -> m'
    # decoded[g, r, x, y, z] = G_g(m'(r, x, y), z)
    decoded = _TABLES[:, relayed, :]
    hits = decoded == X_BITS[None, None, :, None, :]
    return hits.sum(axis=(2, 3, 4)).ravel()


def _pareto(points: np.ndarray) -> np.ndarray:
    order = np.lexsort((-points[:, 1], -points[:, 0]))
    best = -np.inf
    keep = []
    for i in order:
        if points[i, 1] > best:
            keep.append(i)
            best = points[i, 1]
    return points[sorted(keep, key=lambda i: points[i, 0])]


def _upper_hull(points: np.ndarray) -> np.ndarray:
    # shared randomness mixes deterministic strategies; the decreasing part of
    # the hull of the Pareto set plus its projections onto the axes
    pts = np.vstack(
        [points, [points[:, 0].max(), 0.5], [0.5, points[:, 1].max()]]
    )
    pts = np.unique(pts, axis=0)
    hull = []
    for p in pts[np.argsort(pts[:, 0])]:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return np.array(hull)


def classical_frontier() -> ClassicalFrontier:
    """Enumerate every deterministic strategy and return its Pareto frontier."""
    pairs = set()
    for enc in _ENCODINGS:
        ab = np.unique(_bob_scores(enc))
        ac = np.unique(_charlie_scores(enc))
        pairs.update((int(a), int(c)) for a in ab for c in ac)
    arr = np.array(sorted(pairs), dtype=float)
    arr[:, 0] /= 24
    arr[:, 1] /= 72
    pareto = _pareto(arr)
    return ClassicalFrontier(
        pareto=pareto,
        hull=_upper_hull(pareto),
        max_ab=float(arr[:, 0].max()),
        max_ac=float(arr[:, 1].max()),
        n_pairs=len(arr),
    )


def constant_strategy() -> ClassicalStrategy:
    """Alice always sends 0 and everyone guesses 0."""
    return ClassicalStrategy(
        np.zeros(8, dtype=int),
        np.zeros((2, 3), dtype=int),
        np.zeros((2, 3, 2), dtype=int),
        np.zeros((2, 3), dtype=int),
    )


def majority_strategy() -> ClassicalStrategy:
    """Send the majority bit, guess it everywhere, relay it untouched."""
    enc = (X_BITS.sum(axis=1) >= 2).astype(int)
    guess = np.array([[0, 0, 0], [1, 1, 1]])
    relay = np.repeat(np.arange(2)[:, None, None], 3, axis=1).repeat(2, axis=2)
    return ClassicalStrategy(enc, guess, relay, guess.copy())
