"""Dimension witnesses and the min-entropy they certify.

Three witnesses are compared for Bob (first receiver) and Charlie (second):

* the determinant witness ``W`` of a 2-preparation-pair, 2-setting test;
* the 2->1 random access code witness ``T2 = sum_y s_y . t_y`` in ``[2, 2 sqrt 2]``;
* the 3->1 witness ``T3``, same form, in ``[6, 4 sqrt 3]``.

``W`` and ``T2`` have closed-form min-entropy curves.  For ``T3`` the
guessing probability is found numerically, see :func:`pguess_t3`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import qubit
from .errors import DomainError
from .scenario import SIGNS, BinaryInstrument, joint_table, ideal_strategy

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
T2_MAX = 2 * SQRT2
T3_MAX = 4 * SQRT3
EDGE = 1e-12
MODELS = ("antipodal", "general")


def _in_domain(value: float, lo: float, hi: float, what: str) -> float:
    if not lo - EDGE <= value <= hi + EDGE:
        raise DomainError(f"{what}={value} outside [{lo}, {hi}]")
    return min(max(float(value), lo), hi)


# ---------------------------------------------------------------- determinant witness


@dataclass(frozen=True)
class Prob2x2Table:
    """``p[x, y]``: probability of outcome 1 for preparation ``x = 00..11`` and setting ``y``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (4, 2):
            raise DomainError(f"table must have shape (4, 2), got {p.shape}")
        if p.min() < -EDGE or p.max() > 1 + EDGE:
            raise DomainError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "p", p)


def determinant_witness(t: Prob2x2Table) -> float:
    """``det [[p(1|00,0) - p(1|01,0), p(1|10,0) - p(1|11,0)], [same for y = 1]]``."""
    p = t.p
    m = np.array(
        [
            [p[0, 0] - p[1, 0], p[2, 0] - p[3, 0]],
            [p[0, 1] - p[1, 1], p[2, 1] - p[3, 1]],
        ]
    )
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


DET_AXES = (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
DET_BLOCH = np.array([[0, 0, -1], [0, 0, 1], [-1, 0, 0], [1, 0, 0]], dtype=float)


def determinant_subexperiment(eta: float) -> tuple[Prob2x2Table, Prob2x2Table]:
    """Simulated tables for Bob and Charlie in the determinant test.

    Preparations ``00, 01, 10, 11`` point along ``-z, +z, -x, +x``.  Bob
    applies a Lueders instrument of sharpness ``eta`` along ``z`` (``y = 0``)
    or ``x`` (``y = 1``); Charlie measures sharply along the same two axes
    on Bob's output averaged over his setting and outcome.
    """
    eta = _in_domain(eta, 0.0, 1.0, "eta")
    preps = np.stack([qubit.state_from_bloch(v) for v in DET_BLOCH])
    instruments = [BinaryInstrument.from_effect(0.0, eta * ax) for ax in DET_AXES]
    kraus = np.stack([ins.kraus for ins in instruments])
    bob = np.einsum("xij,yji->xy", preps, np.stack([ins.effects[1] for ins in instruments])).real
    relayed = np.einsum("ybij,xjk,yblk->xil", kraus, preps, kraus.conj()) / 2
    sharp = np.stack([qubit.effect_from_params(0.0, ax, 1) for ax in DET_AXES])
    charlie = np.einsum("xij,zji->xz", relayed, sharp).real
    return Prob2x2Table(bob), Prob2x2Table(charlie)


def w_ab(eta):
    return np.asarray(eta, dtype=float) ** 2


def w_ac(eta):
    eta = np.asarray(eta, dtype=float)
    return ((1 + np.sqrt(np.maximum(1 - eta * eta, 0.0))) / 2) ** 2


def theta_from_eta(eta: float) -> float:
    """Weak-measurement angle with ``eta = cos(2 theta)``."""
    eta = _in_domain(eta, 0.0, 1.0, "eta")
    return float(np.arccos(eta) / 2)


def eta_from_theta(theta: float) -> float:
    theta = _in_domain(theta, 0.0, np.pi / 4, "theta")
    return float(np.cos(2 * theta))


def hmin_w(w: float) -> float:
    """``-log2(1/2 + (1/2) sqrt((2 - W)/2))``."""
    w = _in_domain(w, 0.0, 1.0, "W")
    return float(-np.log2(0.5 + 0.5 * np.sqrt((2 - w) / 2))) + 0.0


# ---------------------------------------------------------------- QRAC witnesses


def t2_witnesses(eta):
    eta = np.asarray(eta, dtype=float)
    return T2_MAX * eta, SQRT2 * (1 + np.sqrt(np.maximum(1 - eta * eta, 0.0)))


def t3_witnesses(eta):
    eta = np.asarray(eta, dtype=float)
    return T3_MAX * eta, T3_MAX / 3 * (1 + 2 * np.sqrt(np.maximum(1 - eta * eta, 0.0)))


def qrac_witness(p0: np.ndarray, bits: np.ndarray) -> float:
    """``T = (1/2) sum_{x,y} (-1)^{x_y} E(x, y)`` with ``E = 2 p(0|x,y) - 1``."""
    signs = (-1.0) ** np.asarray(bits)
    return float(0.5 * np.sum(signs * (2 * np.asarray(p0) - 1)))


def t3_from_strategy(s) -> tuple[float, float]:
    """Bob's and Charlie's 3->1 witnesses from a simulated joint table."""
    from .scenario import X_BITS

    t = joint_table(s)
    return qrac_witness(t.p_bob[:, :, 0], X_BITS), qrac_witness(t.p_charlie[:, :, 0], X_BITS)


def t3_simulated(eta: float) -> tuple[float, float]:
    return t3_from_strategy(ideal_strategy(eta))


T2_BITS = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])


def t2_simulated(eta: float) -> tuple[float, float]:
    """2->1 code with preparations ``((-1)^x0, (-1)^x1, 0)/sqrt 2`` and Bob along x, y."""
    eta = _in_domain(eta, 0.0, 1.0, "eta")
    bloch = np.column_stack([(-1.0) ** T2_BITS, np.zeros(4)]) / SQRT2
    preps = np.stack([qubit.state_from_bloch(v) for v in bloch])
    axes = np.eye(3)[:2]
    instruments = [BinaryInstrument.from_effect(0.0, eta * ax) for ax in axes]
    kraus = np.stack([ins.kraus for ins in instruments])
    bob = np.einsum("xij,yji->xy", preps, np.stack([ins.effects[0] for ins in instruments])).real
    relayed = np.einsum("ybij,xjk,yblk->xil", kraus, preps, kraus.conj()) / 2
    sharp = np.stack([qubit.effect_from_params(0.0, ax, 0) for ax in axes])
    charlie = np.einsum("xij,zji->xz", relayed, sharp).real
    return qrac_witness(bob, T2_BITS), qrac_witness(charlie, T2_BITS)


def hmin_t2(t: float) -> float:
    """``-log2(1/2 + (1/2) sqrt((1 + sqrt(1 - ((T^2 - 4)/4)^2))/2))``."""
    t = _in_domain(t, 2.0, T2_MAX, "T")
    u = (t * t - 4) / 4
    return float(-np.log2(0.5 + 0.5 * np.sqrt((1 + np.sqrt(max(1 - u * u, 0.0))) / 2))) + 0.0


# ---------------------------------------------------------------- numerical 3->1 bound


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _antipodal_parts(v):
    half = _unit(v[:12].reshape(4, 3))
    bloch = np.concatenate([half, -half[::-1]])  # n_{7-x} = -n_x
    return bloch, _unit(v[12:15]), 0.0


def _general_parts(v):
    return _unit(v[:24].reshape(8, 3)), _unit(v[24:27]), float(np.tanh(v[27]))


_MODEL = {
    "antipodal": (_antipodal_parts, 15),
    "general": (_general_parts, 28),
}


def _ideal_vector(model: str) -> np.ndarray:
    if model == "antipodal":
        return np.concatenate([SIGNS[:4].ravel(), [1.0, 0.0, 0.0]])
    return np.concatenate([SIGNS.ravel(), [1.0, 0.0, 0.0], [0.0]])


def _witness_and_guess(v, model):
    bloch, u, alpha = _MODEL[model][0](v)
    s = 0.5 * SIGNS.T @ bloch
    sharp = 1 - abs(alpha)
    t = np.linalg.norm(s[1]) + np.linalg.norm(s[2]) + sharp * (s[0] @ u)
    p = 0.5 * (1 + alpha + sharp * (bloch[0] @ u))
    return t, p


@dataclass(frozen=True)
class GuessResult:
    t: float
    p_guess: float
    vector: np.ndarray

    @property
    def hmin(self) -> float:
        return float(-np.log2(min(self.p_guess, 1.0))) + 0.0


def pguess_t3(
    t: float,
    starts: int = 16,
    model: str = "antipodal",
    seed: int = 0,
    warm: np.ndarray | None = None,
) -> GuessResult:
    """Largest ``p(b=0 | x=000, y=0)`` over qubit strategies whose 3->1 witness is at least ``t``.

    Settings ``y = 1, 2`` are taken sharp and aligned with ``s_1, s_2`` (this
    maximises the witness for fixed preparations without touching the
    guessed cell), and setting ``y = 0`` is a unit vector ``u``.  In the
    ``antipodal`` model preparations come in antipodal pairs; ``general``
    frees all eight preparations and gives ``y = 0`` a bias ``alpha``.

    Multi-start SLSQP from the ideal cube strategy, then ``starts`` random
    perturbations of it (half slight, half strong); ``warm`` adds one more.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    t = _in_domain(t, 6.0, T3_MAX, "T")
    from scipy.optimize import minimize

    rng = np.random.default_rng(seed)
    ideal = _ideal_vector(model)
    dim = _MODEL[model][1]
    # the ideal strategy itself is always tried: at the maximal witness it is the only feasible point
    inits = [ideal.copy()] + ([] if warm is None else [np.asarray(warm, dtype=float)])
    for k in range(starts):
        v0 = ideal + rng.normal(scale=0.3 if k < (starts + 1) // 2 else 1.5, size=dim)
        if model == "general":
            v0[27] = 0.0
        inits.append(v0)
    best = None
    for v0 in inits:
        res = minimize(
            lambda v: -_witness_and_guess(v, model)[1],
            v0,
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda v: _witness_and_guess(v, model)[0] - t}],
            options={"ftol": 1e-15, "maxiter": 2000},
        )
        for v in (res.x, v0):
            tv, p = _witness_and_guess(v, model)
            if tv >= t - 1e-10 and (best is None or p > best.p_guess):
                best = GuessResult(t, float(p), v)
    if best is None:
        raise DomainError(f"no strategy reaching T={t} was found")
    return best


def hmin_t3_numeric(t: float, budget: int = 16, model: str = "antipodal", seed: int = 0) -> float:
    """``-log2`` of :func:`pguess_t3`; ``budget`` is the number of random starts."""
    return pguess_t3(t, starts=budget, model=model, seed=seed).hmin


def hmin_t3_curve(
    ts, starts: int = 4, model: str = "antipodal", seed: int = 0
) -> np.ndarray:
    """Numerical 3->1 min-entropy on a grid of witness values.

    Points are solved from the largest ``T`` down, each warm-started from
    its neighbour.  A strategy reaching ``T'`` also reaches every ``T < T'``,
    so the guessing probability is made monotone by carrying the running
    maximum downwards.
    """
    ts = np.asarray(ts, dtype=float)
    order = np.argsort(-ts)
    p = np.empty_like(ts)
    warm = None
    running = 0.0
    for i in order:
        r = pguess_t3(ts[i], starts=starts, model=model, seed=seed, warm=warm)
        warm = r.vector
        running = max(running, r.p_guess)
        p[i] = running
    return -np.log2(np.minimum(p, 1.0)) + 0.0


class T3Entropy:
    """Interpolated numerical min-entropy curve, cached on a fixed witness grid.

    Below the classical value 6 the witness certifies nothing and the curve
    returns 0.
    """

    def __init__(self, points: int = 121, starts: int = 4, model: str = "antipodal", seed: int = 0):
        # denser near the top, where the curve bends and crossovers happen
        u = np.linspace(0.0, 1.0, points)
        self.ts = T3_MAX - (T3_MAX - 6.0) * u**2
        self.h = hmin_t3_curve(self.ts, starts=starts, model=model, seed=seed)
        order = np.argsort(self.ts)
        self.ts, self.h = self.ts[order], self.h[order]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(np.clip(t, 6.0, T3_MAX), self.ts, self.h)
        out = np.where(t <= 6.0, 0.0, out)
        return float(out) if out.ndim == 0 else out


def _h2_or_zero(t: float) -> float:
    return hmin_t2(min(t, T2_MAX)) if t > 2.0 else 0.0


@dataclass(frozen=True)
class Crossover:
    bob_threshold: float | None
    charlie_threshold: float | None
    spacing: float

    def to_dict(self) -> dict:
        return asdict(self)


def crossover_scan(points: int = 1001, hmin_t3=None, verify=None) -> Crossover:
    """Where does the 3->1 witness certify more randomness than the 2->1 one?

    ``bob_threshold`` is the smallest grid ``eta`` with
    ``H3(T3_AB) > H2(T2_AB)``; ``charlie_threshold`` is the largest grid
    ``eta`` with the Charlie-side analogue.  ``hmin_t3`` maps a witness value
    to entropy (default: :class:`T3Entropy`).  ``verify`` (default: the
    direct numerical bound when ``hmin_t3`` is defaulted) re-evaluates the
    grid points on either side of each threshold and walks the threshold
    until both agree.  ``None`` means no crossing on the grid.
    """
    if points < 1000:
        raise DomainError("crossover scan needs at least 1000 grid points")
    if hmin_t3 is None:
        hmin_t3 = T3Entropy()
        if verify is None:

            def verify(t):
                return hmin_t3_numeric(t, budget=8) if t > 6.0 else 0.0

    etas = np.linspace(0.0, 1.0, points)
    spacing = float(etas[1] - etas[0])
    t2ab, t2ac = t2_witnesses(etas)
    t3ab, t3ac = t3_witnesses(etas)

    def bob_gain(i, h3=hmin_t3):
        return h3(t3ab[i]) - _h2_or_zero(t2ab[i])

    def charlie_gain(i, h3=hmin_t3):
        return h3(t3ac[i]) - _h2_or_zero(t2ac[i])

    bob_ok = [i for i in range(points) if bob_gain(i) > 0]
    charlie_ok = [i for i in range(points) if charlie_gain(i) > 0]
    bob = bob_ok[0] if bob_ok else None
    charlie = charlie_ok[-1] if charlie_ok else None

    if verify is not None:
        if bob is not None:
            while bob > 0 and bob_gain(bob - 1, verify) > 0:
                bob -= 1
            while bob < points - 1 and bob_gain(bob, verify) <= 0:
                bob += 1
        if charlie is not None:
            while charlie < points - 1 and charlie_gain(charlie + 1, verify) > 0:
                charlie += 1
            while charlie > 0 and charlie_gain(charlie, verify) <= 0:
                charlie -= 1
    return Crossover(
        None if bob is None else float(etas[bob]),
        None if charlie is None else float(etas[charlie]),
        spacing,
    )


RATE_COLUMNS = (
    "eta",
    "theta",
    "w_ab",
    "w_ac",
    "hmin_w_bob",
    "hmin_w_charlie",
    "t2_ab",
    "t2_ac",
    "hmin_t2_bob",
    "hmin_t2_charlie",
    "t3_ab",
    "t3_ac",
    "hmin_t3_bob",
    "hmin_t3_charlie",
)


def rate_rows(etas, hmin_t3=None) -> list[tuple]:
    """One row per sharpness with every witness and its certified min-entropy."""
    if hmin_t3 is None:
        hmin_t3 = T3Entropy()
    rows = []
    for eta in np.asarray(etas, dtype=float):
        wab, wac = float(w_ab(eta)), float(w_ac(eta))
        t2ab, t2ac = (float(v) for v in t2_witnesses(eta))
        t3ab, t3ac = (float(v) for v in t3_witnesses(eta))
        rows.append(
            (
                float(eta),
                theta_from_eta(eta),
                wab,
                wac,
                hmin_w(wab),
                hmin_w(min(wac, 1.0)),
                t2ab,
                t2ac,
                _h2_or_zero(t2ab),
                _h2_or_zero(t2ac),
                t3ab,
                t3ac,
                float(hmin_t3(t3ab)),
                float(hmin_t3(t3ac)),
            )
        )
    return rows
