"""Prepare-transform-measure strategies for the sequential 3->1 random access code.

Alice prepares one of eight qubit states indexed by ``x = x0 x1 x2``, Bob
applies one of three binary instruments (setting ``y``), and Charlie performs
one of three binary measurements (setting ``z``) on Bob's output.

Index conventions used throughout the package:

* ``x`` runs over ``0..7`` with ``x0`` the most significant bit, so
  ``X_BITS[x]`` is ``(x0, x1, x2)``;
* Kraus operators are stored as ``kraus[y, b]`` and Charlie's effects as
  ``measurements[z, c]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import qubit
from .errors import DomainError, InvalidOperator, UnreachableOutcome
from .qubit import I2, TOL, dag

X_BITS = np.array(list(product((0, 1), repeat=3)), dtype=int)
SIGNS = (-1.0) ** X_BITS
IDEAL_BLOCH = SIGNS / np.sqrt(3)
AB_MAX = 0.5 * (1 + 1 / np.sqrt(3))

RANDOM_MODES = ("general", "pure-prep", "parametrized")


@dataclass(frozen=True)
class BinaryInstrument:
    """Two Kraus operators ``K_0, K_1`` of one of Bob's settings."""

    kraus: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.shape != (2, 2, 2):
            raise InvalidOperator(f"instrument needs two 2x2 Kraus operators, got {k.shape}")
        object.__setattr__(self, "kraus", k)
        effects = self.effects
        for e in effects:
            qubit.check_effect(e)
        if np.max(np.abs(effects[0] + effects[1] - I2)) > TOL:
            raise InvalidOperator("instrument effects do not sum to the identity")

    @classmethod
    def from_effect(cls, alpha: float, t, unitaries=None) -> "BinaryInstrument":
        """Instrument ``K_b = U_b sqrt(B_b)`` for the POVM with observable ``alpha I + t.sigma``."""
        t = np.asarray(t, dtype=float)
        if np.linalg.norm(t) + abs(alpha) > 1 + TOL:
            raise InvalidOperator("|t| + |alpha| must not exceed 1")
        if unitaries is None:
            unitaries = (I2, I2)
        ks = [
            np.asarray(unitaries[b]) @ qubit.sqrt_psd(qubit.effect_from_params(alpha, t, b))
            for b in (0, 1)
        ]
        return cls(np.stack(ks))

    @property
    def effects(self) -> np.ndarray:
        return dag(self.kraus) @ self.kraus

    @property
    def observable(self) -> np.ndarray:
        e = self.effects
        return e[0] - e[1]

    def params(self) -> tuple[float, np.ndarray]:
        """``(alpha, t)`` with observable ``alpha I + t.sigma``."""
        return qubit.observable_params(self.effects[0])

    def unitaries(self) -> np.ndarray:
        return np.stack([qubit.polar_decompose(k)[0] for k in self.kraus])

    @property
    def sharpness(self) -> float:
        return float(np.linalg.norm(self.params()[1]))


@dataclass(frozen=True)
class Strategy:
    """Full triple: eight preparations, three instruments, three measurements."""

    preparations: np.ndarray
    instruments: tuple[BinaryInstrument, BinaryInstrument, BinaryInstrument]
    measurements: np.ndarray

    def __post_init__(self):
        preps = np.asarray(self.preparations, dtype=complex)
        if preps.shape != (8, 2, 2):
            raise InvalidOperator(f"need eight 2x2 preparations, got {preps.shape}")
        for rho in preps:
            qubit.check_state(rho)
        meas = np.asarray(self.measurements, dtype=complex)
        if meas.shape != (3, 2, 2, 2):
            raise InvalidOperator(f"measurements must have shape (3, 2, 2, 2), got {meas.shape}")
        for z in range(3):
            for c in range(2):
                qubit.check_effect(meas[z, c])
            if np.max(np.abs(meas[z, 0] + meas[z, 1] - I2)) > TOL:
                raise InvalidOperator(f"measurement z={z} is not complete")
        instruments = tuple(self.instruments)
        if len(instruments) != 3:
            raise InvalidOperator("need exactly three instruments")
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "measurements", meas)
        object.__setattr__(self, "instruments", instruments)

    @property
    def kraus(self) -> np.ndarray:
        """Kraus operators stacked as ``kraus[y, b]``."""
        return np.stack([ins.kraus for ins in self.instruments])

    @property
    def bob_effects(self) -> np.ndarray:
        return np.stack([ins.effects for ins in self.instruments])

    def bloch_vectors(self) -> np.ndarray:
        return qubit.bloch_of(self.preparations)

    def conjugate(self) -> "Strategy":
        """Entrywise complex conjugate of every operator (reflects the Bloch y-axis)."""
        return Strategy(
            self.preparations.conj(),
            tuple(BinaryInstrument(ins.kraus.conj()) for ins in self.instruments),
            self.measurements.conj(),
        )

    def rotate(self, u: np.ndarray) -> "Strategy":
        """Apply the collective unitary ``u`` to every operator."""
        u = np.asarray(u, dtype=complex)
        ud = dag(u)
        return Strategy(
            u @ self.preparations @ ud,
            tuple(BinaryInstrument(u @ ins.kraus @ ud) for ins in self.instruments),
            u @ self.measurements @ ud,
        )


@dataclass(frozen=True)
class JointTable:
    """``p[x, y, b, z, c]`` together with Bob's and Charlie's marginals."""

    p: np.ndarray
    p_bob: np.ndarray = field(repr=False)
    p_charlie: np.ndarray = field(repr=False)

    def check(self, tol: float = TOL) -> None:
        if self.p.min() < -tol or self.p.max() > 1 + tol:
            raise InvalidOperator("joint table has entries outside [0, 1]")
        norms = self.p.sum(axis=(2, 4))
        if np.max(np.abs(norms - 1)) > tol:
            raise InvalidOperator("joint table rows do not sum to one")
        marg = self.p.sum(axis=4)  # (x, y, b, z)
        if np.max(np.abs(marg - self.p_bob[:, :, :, None])) > tol:
            raise InvalidOperator("Bob's marginal depends on Charlie's setting")


def ideal_bloch_vectors() -> np.ndarray:
    return IDEAL_BLOCH.copy()


def preparations_from_bloch(vectors) -> np.ndarray:
    return np.stack([qubit.state_from_bloch(v) for v in np.asarray(vectors, dtype=float)])


def ideal_preparations() -> np.ndarray:
    """Pure cube states ``n_x = ((-1)^x0, (-1)^x1, (-1)^x2)/sqrt(3)``."""
    return preparations_from_bloch(IDEAL_BLOCH)


def luders_instrument_set(eta: float) -> tuple[BinaryInstrument, ...]:
    """Unsharp Lueders instruments along x, y, z with common sharpness ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"sharpness must lie in [0, 1], got {eta}")
    return tuple(BinaryInstrument.from_effect(0.0, eta * np.eye(3)[y]) for y in range(3))


def measurements_from_params(params) -> np.ndarray:
    """Stack ``[(C_0|z, C_1|z)]`` from ``(alpha_z, t_z)`` pairs."""
    return np.stack(
        [
            np.stack([qubit.effect_from_params(a, t, 0), qubit.effect_from_params(a, t, 1)])
            for a, t in params
        ]
    )


def ideal_measurements() -> np.ndarray:
    """Projective measurements along x, y, z; outcome 0 is |+>, |i>, |0>."""
    return measurements_from_params([(0.0, np.eye(3)[z]) for z in range(3)])


def ideal_strategy(eta: float = 1.0) -> Strategy:
    return Strategy(ideal_preparations(), luders_instrument_set(eta), ideal_measurements())


def post_measurement_state(rho, k) -> np.ndarray:
    """Normalised ``K rho K^dag``."""
    rho = np.asarray(rho, dtype=complex)
    k = np.asarray(k, dtype=complex)
    out = k @ rho @ dag(k)
    prob = np.trace(out).real
    if prob <= 1e-12:
        raise UnreachableOutcome(f"outcome probability {prob:.3e} is zero")
    return out / prob


def effective_state(rho, instruments) -> np.ndarray:
    """Bob's output averaged over his setting and outcome, ``(1/3) sum K rho K^dag``."""
    rho = np.asarray(rho, dtype=complex)
    kraus = np.stack([ins.kraus for ins in instruments])
    return np.einsum("ybij,jk,yblk->il", kraus, rho, kraus.conj()) / len(instruments)


def relay_states(preparations, instruments) -> np.ndarray:
    """:func:`effective_state` for a stack of preparations."""
    kraus = np.stack([ins.kraus for ins in instruments])
    return np.einsum("ybij,xjk,yblk->xil", kraus, preparations, kraus.conj()) / len(instruments)


def joint_table(s: Strategy) -> JointTable:
    """``p(b, c | x, y, z) = tr[K_b|y rho_x K_b|y^dag C_c|z]`` for all 288 cells."""
    k = s.kraus
    post = np.einsum("ybij,xjk,yblk->xybil", k, s.preparations, k.conj())
    p = np.einsum("xybil,zcli->xybzc", post, s.measurements).real
    p_bob = np.trace(post, axis1=-2, axis2=-1).real
    p_charlie = p.sum(axis=2).mean(axis=1)
    return JointTable(p=p, p_bob=p_bob, p_charlie=p_charlie)


def apply_visibility(s: Strategy, v_a: float, v_b: float, v_c: float) -> Strategy:
    """Shrink preparation, instrument and measurement Bloch parts by the visibilities.

    Instruments keep their polar unitaries; only the effect vector ``t_y`` is
    scaled and the Kraus operators are rebuilt as ``U_b sqrt(B_b)``.
    """
    for v in (v_a, v_b, v_c):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"visibility must lie in [0, 1], got {v}")
    preps = preparations_from_bloch(v_a * s.bloch_vectors())
    instruments = []
    for ins in s.instruments:
        alpha, t = ins.params()
        instruments.append(BinaryInstrument.from_effect(alpha, v_b * t, ins.unitaries()))
    meas = []
    for z in range(3):
        alpha, t = qubit.observable_params(s.measurements[z, 0])
        meas.append((alpha, v_c * t))
    return Strategy(preps, tuple(instruments), measurements_from_params(meas))


def chain_closed_form(k: int) -> np.ndarray:
    i = np.arange(1, k + 1)
    return 0.5 * (1 + np.sqrt(3) / 3.0**i)


def sequential_chain(k: int, return_lengths: bool = False):
    """Success rates ``A_1..A_k`` of ``k`` sharp decoders relaying in sequence.

    Each decoder measures the ideal sharp Lueders instruments on the ensemble
    it receives and relays the setting- and outcome-averaged output.
    """
    if not 1 <= k <= 20:
        raise DomainError(f"chain length must lie in 1..20, got {k}")
    instruments = luders_instrument_set(1.0)
    effects = np.stack([ins.effects for ins in instruments])
    states = ideal_preparations()
    rates, lengths = [], []
    for _ in range(k):
        # p(b = x_y | x, y) summed over the 24 cells
        hits = sum(
            np.trace(states[x] @ effects[y, X_BITS[x, y]]).real
            for x in range(8)
            for y in range(3)
        )
        rates.append(hits / 24)
        lengths.append(float(np.linalg.norm(qubit.bloch_of(states[0]))))
        states = relay_states(states, instruments)
    rates = np.array(rates)
    return (rates, np.array(lengths)) if return_lengths else rates


def _random_ball(rng: np.random.Generator) -> np.ndarray:
    return qubit.random_direction(rng) * rng.uniform() ** (1 / 3)


def random_instrument(rng: np.random.Generator) -> BinaryInstrument:
    """Extremal-form instrument ``U_b sqrt(B_b)`` with random POVM and unitaries."""
    eta = rng.uniform()
    alpha = rng.uniform(-(1 - eta), 1 - eta)
    t = eta * qubit.random_direction(rng)
    return BinaryInstrument.from_effect(
        alpha, t, (qubit.random_unitary(rng), qubit.random_unitary(rng))
    )


def random_strategy(seed: int, mode: str = "general") -> Strategy:
    """Reproducible random strategy.

    ``general`` draws mixed preparations uniformly from the Bloch ball,
    ``pure-prep`` draws them from the sphere, and ``parametrized`` samples a
    uniformly random point of the five-angle family of
    :func:`seqrac.optimizer.param_strategy`.
    """
    if mode not in RANDOM_MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {RANDOM_MODES}")
    rng = np.random.default_rng(seed)
    if mode == "parametrized":
        from .optimizer import ParamPoint, param_strategy

        return param_strategy(ParamPoint(*rng.uniform(0, np.pi / 2, size=5)))
    draw = _random_ball if mode == "general" else qubit.random_direction
    preps = preparations_from_bloch([draw(rng) for _ in range(8)])
    instruments = tuple(random_instrument(rng) for _ in range(3))
    meas = measurements_from_params([(0.0, qubit.random_direction(rng)) for _ in range(3)])
    return Strategy(preps, instruments, meas)
