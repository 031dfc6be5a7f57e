"""Search for the largest ``A_AC`` at fixed ``A_AB``.

Two searches are provided.

``param``
    Alice's preparations are the antipodal family
    ``n_x = ((-1)^x0 a, (-1)^x1 b, (-1)^x2 c)`` with
    ``(a, b, c) = (sin mu cos phi, sin mu sin phi, cos mu)`` and Bob measures
    along the coordinate axes with sharpness ``cos phi_y``.  The success
    rates are then explicit trigonometric polynomials (:func:`ac_param`,
    :func:`ab_param`) and the constraint is solved for ``phi_2``.

``general``
    Eight free pure preparations and three free binary POVMs.  Charlie is
    not searched: for every ``(y, b, z)`` the relayed operator is measured
    along the top eigenvector of ``sqrt(B) (s_z . sigma) sqrt(B)``, which
    gives the upper bound :func:`relaxed_ac`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qubit
from .errors import DomainError
from .scenario import (
    IDEAL_BLOCH,
    AB_MAX,
    SIGNS,
    BinaryInstrument,
    Strategy,
    ideal_measurements,
    preparations_from_bloch,
)
from .witnesses import tradeoff_bound

HALF_PI = np.pi / 2
GOLDEN = (np.sqrt(5) - 1) / 2
PENALTY = 1e5
FEASIBLE = 1e-12
SOUNDNESS_TOL = 1e-6


@dataclass(frozen=True)
class ParamPoint:
    mu: float
    phi: float
    phi0: float
    phi1: float
    phi2: float

    def __post_init__(self):
        for name, v in zip(("mu", "phi", "phi0", "phi1", "phi2"), self.as_array()):
            if not -1e-12 <= v <= HALF_PI + 1e-12:
                raise DomainError(f"{name}={v} outside [0, pi/2]")

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.phi, self.phi0, self.phi1, self.phi2], dtype=float)

    @classmethod
    def symmetric(cls, eta: float) -> "ParamPoint":
        """Cube preparations with all three sharpnesses equal to ``eta``."""
        angle = float(np.arccos(np.clip(eta, 0.0, 1.0)))
        return cls(float(np.arccos(1 / np.sqrt(3))), np.pi / 4, angle, angle, angle)


def _abc(mu, phi):
    return np.sin(mu) * np.cos(phi), np.sin(mu) * np.sin(phi), np.cos(mu)


def ac_angles(mu, phi, p0, p1, p2):
    """Vectorised form of :func:`ac_param`."""
    a, b, c = _abc(mu, phi)
    s0, s1, s2 = np.sin(p0), np.sin(p1), np.sin(p2)
    return 0.5 + (a + b + c + a * (s1 + s2) + b * (s0 + s2) + c * (s0 + s1)) / 18


def ab_angles(mu, phi, p0, p1, p2):
    """Vectorised form of :func:`ab_param`."""
    a, b, c = _abc(mu, phi)
    return 0.5 + (a * np.cos(p0) + b * np.cos(p1) + c * np.cos(p2)) / 6


def ac_param(p: ParamPoint) -> float:
    return float(ac_angles(*p.as_array()))


def ab_param(p: ParamPoint) -> float:
    return float(ab_angles(*p.as_array()))


def param_bloch(p: ParamPoint) -> np.ndarray:
    a, b, c = _abc(p.mu, p.phi)
    return SIGNS * np.array([a, b, c])


def param_strategy(p: ParamPoint) -> Strategy:
    """Concrete strategy realising ``(ab_param(p), ac_param(p))``."""
    etas = np.cos([p.phi0, p.phi1, p.phi2])
    instruments = tuple(
        BinaryInstrument.from_effect(0.0, etas[y] * np.eye(3)[y]) for y in range(3)
    )
    return Strategy(preparations_from_bloch(param_bloch(p)), instruments, ideal_measurements())


def gamma_vectors(preps) -> np.ndarray:
    """Rows ``s_z = (1/2) sum_x (-1)^{x_z} n_x``; accepts density matrices or Bloch vectors."""
    preps = np.asarray(preps)
    bloch = qubit.bloch_of(preps) if preps.shape[-2:] == (2, 2) else preps.astype(float)
    return 0.5 * SIGNS.T @ bloch


def _effect_params(effects):
    """Accept instruments, a ``(3, 2, 2, 2)`` effect stack or ``(alphas, ts)``."""
    if isinstance(effects, tuple) and len(effects) == 2 and np.ndim(effects[0]) == 1:
        return np.asarray(effects[0], dtype=float), np.asarray(effects[1], dtype=float)
    if isinstance(effects, (tuple, list)) and isinstance(effects[0], BinaryInstrument):
        effects = np.stack([ins.effects for ins in effects])
    effects = np.asarray(effects)
    pairs = [qubit.observable_params(effects[y, 0]) for y in range(len(effects))]
    return np.array([p[0] for p in pairs]), np.stack([p[1] for p in pairs])


def t_bound(effects, s) -> float:
    """Cross-term sum ``sum_{y != y~, b} lambda_max[sqrt(B_b|y) (s_y~ . sigma) sqrt(B_b|y)]``.

    Evaluated one eigenvalue at a time with :func:`qubit.lambda_max_kernel`.
    """
    alphas, ts = _effect_params(effects)
    total = 0.0
    for y in range(3):
        for b in range(2):
            e = qubit.effect_from_params(alphas[y], ts[y], b)
            for yt in range(3):
                if yt != y:
                    total += qubit.lambda_max_kernel(e, s[yt])
    return total


def t_bound_closed(effects, s) -> float:
    """Same sum through ``(|s|/2) sqrt((1 +- alpha)^2 - |t|^2 (1 - (t_hat . s_hat)^2))``."""
    alphas, ts = _effect_params(effects)
    s = np.asarray(s, dtype=float)
    total = 0.0
    for y in range(3):
        tn = np.linalg.norm(ts[y])
        for yt in range(3):
            if yt == y:
                continue
            sn = np.linalg.norm(s[yt])
            if sn == 0.0:
                continue
            cos2 = (ts[y] @ s[yt] / (tn * sn)) ** 2 if tn > 0 else 0.0
            for sign in (1.0, -1.0):
                rad = (1 + sign * alphas[y]) ** 2 - tn * tn * (1 - cos2)
                total += 0.5 * sn * np.sqrt(max(rad, 0.0))
    return float(total)


def max_t_closed(s_norms, t_diag) -> float:
    """Cross-term sum for ``alpha = 0`` and axis-aligned ``t_y = t_yy e_y``."""
    s0, s1, s2 = s_norms
    r0, r1, r2 = (np.sqrt(max(1 - t * t, 0.0)) for t in t_diag)
    return float(s0 * (r1 + r2) + s1 * (r0 + r2) + s2 * (r0 + r1))


def relaxed_ac(bloch, alphas, ts) -> float:
    """``1/2 + (1/72) sum_{y,b,z} lambda_max`` with Charlie aligned per ``(y, b, z)``."""
    s = gamma_vectors(np.asarray(bloch, dtype=float))
    alphas = np.asarray(alphas, dtype=float)
    ts = np.asarray(ts, dtype=float)
    sign = np.array([1.0, -1.0])
    c = 0.5 * (1 + sign[None, :] * alphas[:, None])  # (y, b)
    r = 0.5 * sign[None, :, None] * ts[:, None, :]  # (y, b, 3)
    lam = qubit.lambda_max_closed(c[:, :, None], r[:, :, None, :], s[None, None, :, :])
    return float(0.5 + lam.sum() / 72)


# ---------------------------------------------------------------- symmetric reduction


@dataclass(frozen=True)
class ReductionCertificate:
    phi: float
    holds: bool
    slacks: dict = field(default_factory=dict)


def reduction_certificate(p: ParamPoint, tol: float = 1e-12) -> ReductionCertificate:
    """Check that the symmetric point with the same ``A_AB`` does at least as well.

    ``phi`` solves ``a cos phi0 + b cos phi1 + c cos phi2 = sqrt(3) cos phi``.
    The inequalities checked, all written as ``lhs - rhs <= 0``:

    * ``full``: ``ac_param(p) <= ac_param(symmetric(phi))``;
    * ``cross``: the ``sin phi_y`` part alone is at most ``sqrt(3) + 2 sqrt(3) sin phi``;
    * ``cyclic_a`` / ``cyclic_b``: each cyclic half is at most ``sqrt(3) sin phi``;
    * ``pairs``: ``sum sin sin + sum cos cos <= 3`` over the three pairs.
    """
    mu, ph, p0, p1, p2 = p.as_array()
    a, b, c = _abc(mu, ph)
    sq3 = np.sqrt(3.0)
    phi = float(np.arccos(np.clip((a * np.cos(p0) + b * np.cos(p1) + c * np.cos(p2)) / sq3, 0, 1)))
    s0, s1, s2 = np.sin([p0, p1, p2])
    c0, c1, c2 = np.cos([p0, p1, p2])
    cross = a * (s1 + s2) + b * (s0 + s2) + c * (s0 + s1)
    rhs_half = sq3 * np.sin(phi)
    slacks = {
        "full": float(a + b + c + cross - (sq3 + 2 * rhs_half)),
        "cross": float(cross - (sq3 + 2 * rhs_half)),
        "cyclic_a": float(a * s1 + b * s2 + c * s0 - rhs_half),
        "cyclic_b": float(a * s2 + b * s0 + c * s1 - rhs_half),
        "pairs": float(s1 * s2 + s0 * s1 + s0 * s2 + c1 * c2 + c0 * c1 + c0 * c2 - 3),
    }
    return ReductionCertificate(phi, all(v <= tol for v in slacks.values()), slacks)


def reduction_slacks(angles: np.ndarray) -> dict:
    """Vectorised slacks of :func:`reduction_certificate` for an ``(N, 5)`` array."""
    mu, ph, p0, p1, p2 = np.asarray(angles, dtype=float).T
    a, b, c = _abc(mu, ph)
    sq3 = np.sqrt(3.0)
    phi = np.arccos(np.clip((a * np.cos(p0) + b * np.cos(p1) + c * np.cos(p2)) / sq3, 0, 1))
    s0, s1, s2 = np.sin(p0), np.sin(p1), np.sin(p2)
    c0, c1, c2 = np.cos(p0), np.cos(p1), np.cos(p2)
    cross = a * (s1 + s2) + b * (s0 + s2) + c * (s0 + s1)
    half = sq3 * np.sin(phi)
    return {
        "full": a + b + c + cross - (sq3 + 2 * half),
        "cross": cross - (sq3 + 2 * half),
        "cyclic_a": a * s1 + b * s2 + c * s0 - half,
        "cyclic_b": a * s2 + b * s0 + c * s1 - half,
        "pairs": s1 * s2 + s0 * s1 + s0 * s2 + c1 * c2 + c0 * c1 + c0 * c2 - 3,
    }


# ---------------------------------------------------------------- search


@dataclass
class FrontierResult:
    a_ab_target: float
    bound: float
    best_ac: float
    argmax: object
    evaluations: int
    mode: str
    seed: int
    ab_achieved: float = float("nan")

    @property
    def gap(self) -> float:
        """``bound - best_ac``; negative means the search beat the curve."""
        return self.bound - self.best_ac

    @property
    def exceeds_bound(self) -> bool:
        return self.best_ac > self.bound + SOUNDNESS_TOL


class _BudgetSpent(Exception):
    pass


class _Counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    @property
    def exhausted(self) -> bool:
        return self.used >= self.budget

    def tick(self) -> None:
        if self.exhausted:
            raise _BudgetSpent
        self.used += 1


def _solve_phi2(q, k):
    """Complete ``q = (mu, phi, phi0, phi1)`` so that ``a cos phi0 + b cos phi1 + c cos phi2 = k``.

    Returns the five angles and the absolute constraint violation left after
    clipping ``cos phi2`` into [0, 1].
    """
    mu, ph, p0, p1 = q
    a, b, c = _abc(mu, ph)
    rest = k - a * np.cos(p0) - b * np.cos(p1)
    if c > 1e-15:
        cos2 = min(max(rest / c, 0.0), 1.0)
        viol = abs(rest - c * cos2)
    else:
        cos2 = 0.0
        viol = abs(rest)
    return np.array([mu, ph, p0, p1, np.arccos(cos2)]), viol


def _repair(angles, k):
    """Move ``phi1`` then ``phi0`` to absorb a violation ``phi2`` could not."""
    mu, ph, p0, p1, p2 = angles
    a, b, c = _abc(mu, ph)
    cos = np.cos([p0, p1, p2])
    coef = np.array([a, b, c])
    for i in (1, 0):
        rest = k - coef @ cos + coef[i] * cos[i]
        if coef[i] > 1e-15:
            cos[i] = min(max(rest / coef[i], 0.0), 1.0)
    viol = abs(k - coef @ cos)
    return np.array([mu, ph, *np.arccos(np.clip(cos, 0.0, 1.0))]), viol


class _ParamSearch:
    def __init__(self, target: float, counter: _Counter):
        self.k = 6 * (target - 0.5)
        self.counter = counter

    def score(self, q) -> float:
        self.counter.tick()
        angles, viol = _solve_phi2(q, self.k)
        return float(ac_angles(*angles)) - PENALTY * viol

    def line(self, q, f, direction, lo, hi, iters):
        """Golden-section search of ``t -> score(q + t d)`` on ``[lo, hi]``, endpoints included."""
        best_t, best_f = 0.0, f
        for t in (lo, hi):
            ft = self.score(np.clip(q + t * direction, 0, HALF_PI))
            if ft > best_f:
                best_t, best_f = t, ft
        a, b = lo, hi
        x1 = b - GOLDEN * (b - a)
        x2 = a + GOLDEN * (b - a)
        f1 = self.score(np.clip(q + x1 * direction, 0, HALF_PI))
        f2 = self.score(np.clip(q + x2 * direction, 0, HALF_PI))
        for _ in range(iters):
            if f1 >= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - GOLDEN * (b - a)
                f1 = self.score(np.clip(q + x1 * direction, 0, HALF_PI))
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + GOLDEN * (b - a)
                f2 = self.score(np.clip(q + x2 * direction, 0, HALF_PI))
        for t, ft in ((x1, f1), (x2, f2)):
            if ft > best_f:
                best_t, best_f = t, ft
        return np.clip(q + best_t * direction, 0, HALF_PI), best_f

    def refine(self, q, f, sweeps, step, iters=40):
        """Coordinate sweeps with a pattern move along each sweep's displacement."""
        eye = np.eye(4)
        try:
            for _ in range(sweeps):
                start, f_start = q.copy(), f
                for i in range(4):
                    lo = max(-step, -q[i])
                    hi = min(step, HALF_PI - q[i])
                    q, f = self.line(q, f, eye[i], lo, hi, iters)
                move = q - start
                norm = np.linalg.norm(move)
                if norm > 1e-14:
                    q, f = self.line(q, f, move / norm, -2 * norm, 4 * norm, iters)
                if f - f_start < 1e-15:
                    step *= 0.5
                    if step < 1e-10:
                        break
        except _BudgetSpent:
            pass
        return q, f, step


def _maximize_param(target: float, budget: int, seed: int, starts: int) -> FrontierResult:
    counter = _Counter(budget)
    search = _ParamSearch(target, counter)
    rng = np.random.default_rng(seed)
    runs = []
    # stage one: short refinement from every start
    for _ in range(starts):
        if counter.exhausted:
            break
        q = rng.uniform(0, HALF_PI, size=4)
        f = search.score(q)
        q, f, step = search.refine(q, f, sweeps=3, step=np.pi / 4, iters=20)
        runs.append((f, q, step))
    # stage two: spend what is left on the most promising starts
    runs.sort(key=lambda r: -r[0])
    keep = runs[: max(1, starts // 8)]
    share = max((budget - counter.used) // len(keep), 0)
    refined = []
    for f, q, step in keep:
        counter.budget = counter.used + share
        q, f, _ = search.refine(q, f, sweeps=10_000, step=step, iters=40)
        refined.append((f, q))
    counter.budget = budget

    best = None
    for f, q in refined + [(f, q) for f, q, _ in runs]:
        angles, viol = _solve_phi2(q, search.k)
        if viol > FEASIBLE:
            angles, viol = _repair(angles, search.k)
        if viol > FEASIBLE:
            continue
        ac = float(ac_angles(*angles))
        if best is None or ac > best[0]:
            best = (ac, angles)
    if best is None:
        return FrontierResult(target, tradeoff_bound(target), float("nan"), None, counter.used, "param", seed)
    ac, angles = best
    point = ParamPoint(*np.clip(angles, 0, HALF_PI))
    return FrontierResult(
        target, tradeoff_bound(target), ac, point, counter.used, "param", seed, ab_param(point)
    )


def _unpack_general(v, target):
    """Map an unconstrained vector to ``(bloch, alphas, ts)`` meeting ``A_AB = target``."""
    th, ph = v[:8], v[8:16]
    bloch = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    d = v[16:25].reshape(3, 3)
    raw = d * (0.5 * (1 + np.tanh(v[25:28])))[:, None] / np.maximum(
        np.linalg.norm(d, axis=1, keepdims=True), 1e-300
    )
    s = gamma_vectors(bloch)
    gain = float(np.sum(s * raw))
    need = 24 * (target - 0.5)
    if need == 0.0:
        ts = np.zeros((3, 3))
    elif gain <= 1e-15:
        return None
    else:
        ts = raw * (need / gain)
    norms = np.linalg.norm(ts, axis=1)
    if np.any(norms > 1 + 1e-12):
        return None
    alphas = (1 - norms) * np.tanh(v[28:31])
    return bloch, alphas, ts


def _start_bloch(rng, kind: str, exact: bool) -> np.ndarray:
    if kind == "cube":
        # cube states blurred by a random amount; large blurs are nearly uniform
        blur = 0.0 if exact else rng.uniform(0, 2)
        return IDEAL_BLOCH + blur * rng.normal(size=(8, 3))
    # one axis, signed by a random threshold function of the bits (majority,
    # dictator, ...): the commuting strategies that act classically
    weights = rng.uniform(0.1, 1.0, 3)
    signs = np.where(SIGNS @ weights >= 0, 1.0, -1.0)
    axis = rng.normal(size=3)
    noise = 0.0 if exact else rng.uniform(0, 0.1)
    return signs[:, None] * axis / np.linalg.norm(axis) + noise * rng.normal(size=(8, 3))


def _feasible_start(rng, target, tries: int = 200, exact: bool = False, kind: str = "cube"):
    """Random start whose Bob directions lean towards Alice's signed sums, so it is feasible.

    ``kind`` is ``cube`` (blurred cube states) or ``collinear``.  ``exact``
    returns the unblurred cube strategy, the only feasible point when
    ``target`` is the quantum maximum.
    """
    for i in range(tries):
        # the first collinear try is noiseless: at A_AB = 3/4 nothing else is feasible
        clean = exact or (kind == "collinear" and i == 0)
        v0 = rng.normal(size=31)
        bloch = _start_bloch(rng, kind, clean)
        bloch /= np.linalg.norm(bloch, axis=1, keepdims=True)
        v0[:8] = np.arccos(np.clip(bloch[:, 2], -1, 1))
        v0[8:16] = np.arctan2(bloch[:, 1], bloch[:, 0])
        v0[16:25] = (gamma_vectors(bloch) + (0.0 if clean else 0.3) * rng.normal(size=(3, 3))).ravel()
        v0[25:28] = 3.0 if clean else rng.uniform(0, 3, 3)
        if _unpack_general(v0, target) is not None:
            return v0
    return None


def _maximize_general(target: float, budget: int, seed: int, starts: int) -> FrontierResult:
    from scipy.optimize import minimize

    counter = _Counter(budget)
    best = None

    def objective(v):
        if counter.exhausted:
            raise _BudgetSpent
        counter.used += 1
        parts = _unpack_general(v, target)
        if parts is None:
            return 1.0
        return -relaxed_ac(*parts)

    rng = np.random.default_rng(seed)
    per_start = max(budget // starts, 50)
    for k in range(starts):
        if counter.exhausted:
            break
        v0 = _feasible_start(rng, target, exact=k == 0, kind="collinear" if k % 2 else "cube")
        if v0 is None:
            continue
        # Nelder-Mead keeps its best vertex in res.x; track it ourselves so
        # a budget stop mid-run still yields a point
        state = {"x": v0, "f": objective(v0)}

        def tracked(v):
            f = objective(v)
            if f < state["f"]:
                state["x"], state["f"] = np.array(v), f
            return f

        try:
            minimize(
                tracked,
                v0,
                method="Nelder-Mead",
                options={"maxfev": per_start, "xatol": 1e-10, "fatol": 1e-13},
            )
        except _BudgetSpent:
            pass
        parts = _unpack_general(state["x"], target)
        if parts is None:
            continue
        ac = relaxed_ac(*parts)
        if best is None or ac > best[0]:
            best = (ac, parts)
    if best is None:
        return FrontierResult(target, tradeoff_bound(target), float("nan"), None, counter.used, "general", seed)
    ac, (bloch, alphas, ts) = best
    ab = 0.5 + float(np.sum(gamma_vectors(bloch) * ts)) / 24
    argmax = {"bloch": bloch, "alphas": alphas, "ts": ts}
    return FrontierResult(target, tradeoff_bound(target), ac, argmax, counter.used, "general", seed, ab)


def maximize_ac(
    a_ab_target: float,
    budget: int = 100_000,
    mode: str = "param",
    seed: int = 0,
    starts: int = 64,
) -> FrontierResult:
    """Best ``A_AC`` found subject to ``A_AB = a_ab_target``.

    One evaluation is one objective call.  In ``param`` mode the result is a
    feasible :class:`ParamPoint` (constraint met to 1e-12).  In ``general``
    mode ``best_ac`` is the relaxed value of :func:`relaxed_ac`; it may lie
    above :func:`tradeoff_bound`, which the result reports via
    ``exceeds_bound`` instead of hiding.
    """
    if not 0.5 - 1e-12 <= a_ab_target <= AB_MAX + 1e-12:
        raise DomainError(f"target A_AB={a_ab_target} outside [1/2, {AB_MAX:.6f}]")
    if budget < 1:
        raise DomainError("budget must be positive")
    a_ab_target = float(np.clip(a_ab_target, 0.5, AB_MAX))
    if mode == "param":
        return _maximize_param(a_ab_target, budget, seed, starts)
    if mode == "general":
        return _maximize_general(a_ab_target, budget, seed, starts)
    raise ValueError(f"unknown mode {mode!r}")
