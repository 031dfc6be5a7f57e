"""Correlation witnesses, the sharpness trade-off curve and sharpness certification.

``A_AB`` is Bob's average success at recovering ``x_y`` and ``A_AC`` is
Charlie's average success at recovering ``x_z`` from Bob's relayed qubit.
For the unsharp Lueders family with sharpness ``eta``::

    A_AB = 1/2 + (sqrt(3)/6) eta
    A_AC = 1/2 + (sqrt(3)/18) (1 + 2 sqrt(1 - eta^2))

and eliminating ``eta`` gives :func:`tradeoff_bound`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, InfeasibleStatistics
from .scenario import AB_MAX, X_BITS, JointTable, Strategy

SQRT3 = np.sqrt(3.0)
AC_MAX = AB_MAX
AC_AT_SHARP = 0.5 * (1 + SQRT3 / 9)
CLASSICAL_MAX = 0.75
RADICAND_SLACK = 1e-12
DOMAIN_TOL = 1e-9
FEASIBILITY_TOL = 1e-6

_Y = np.arange(3)


def _clamped_sqrt(value, what: str):
    """Square root that forgives float dust below zero but rejects real negatives."""
    value = np.asarray(value, dtype=float)
    if np.any(value < -RADICAND_SLACK):
        raise DomainError(f"negative radicand in {what}: {float(np.min(value)):.3e}")
    return np.sqrt(np.maximum(value, 0.0))


def _check_eta(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < -DOMAIN_TOL) or np.any(eta > 1 + DOMAIN_TOL):
        raise DomainError("sharpness must lie in [0, 1]")
    return np.clip(eta, 0.0, 1.0)


def _stable_mean(values: np.ndarray) -> float:
    # shifting by one sample keeps identical cells from losing an ulp in the sum
    ref = values.flat[0]
    return float(ref + (values - ref).mean())


def witness_ab(table: JointTable) -> float:
    """Average of ``p_B(b = x_y | x, y)`` over the 24 cells."""
    return _stable_mean(table.p_bob[np.arange(8)[:, None], _Y[None, :], X_BITS])


def witness_ac(table: JointTable) -> float:
    """Average of ``p_C(c = x_z | x, z)`` over the 24 cells."""
    return _stable_mean(table.p_charlie[np.arange(8)[:, None], _Y[None, :], X_BITS])


def witness_ab_direct(s: Strategy) -> float:
    """``(1/24) sum_{x,y} tr[rho_x B_{x_y|y}]`` straight from the operators."""
    effects = s.bob_effects
    total = 0.0
    for x in range(8):
        for y in range(3):
            total += np.trace(s.preparations[x] @ effects[y, X_BITS[x, y]]).real
    return total / 24


def witness_pair(s: Strategy) -> tuple[float, float]:
    from .scenario import joint_table

    t = joint_table(s)
    return witness_ab(t), witness_ac(t)


def tradeoff_bound(a_ab):
    """Largest ``A_AC`` compatible with ``A_AB`` for the unsharp family.

    ``1/2 + (sqrt(3)/18)(1 + 2 sqrt(12 a - 12 a^2 - 2))`` on
    ``[1/2, (1 + 1/sqrt(3))/2]``.
    """
    a = np.asarray(a_ab, dtype=float)
    if np.any(a < 0.5 - DOMAIN_TOL) or np.any(a > AB_MAX + DOMAIN_TOL):
        raise DomainError(f"A_AB outside [1/2, {AB_MAX:.6f}]")
    a = np.clip(a, 0.5, AB_MAX)
    radicand = 12 * a - 12 * a * a - 2
    out = 0.5 + SQRT3 / 18 * (1 + 2 * _clamped_sqrt(radicand, "tradeoff_bound"))
    return float(out) if out.ndim == 0 else out


def ab_from_eta(eta):
    eta = _check_eta(eta)
    out = 0.5 + SQRT3 / 6 * eta
    return float(out) if out.ndim == 0 else out


def ac_from_eta(eta):
    eta = _check_eta(eta)
    out = 0.5 + SQRT3 / 18 * (1 + 2 * np.sqrt(1 - eta * eta))
    return float(out) if out.ndim == 0 else out


def eta_lower(a_ab: float) -> tuple[float, bool]:
    """Lower bound ``sqrt(3)(2 A_AB - 1)`` on Bob's sharpness, clamped to [0, 1]."""
    if not 0.0 <= a_ab <= 1.0:
        raise DomainError(f"A_AB must lie in [0, 1], got {a_ab}")
    value = float(np.clip(SQRT3 * (2 * a_ab - 1), 0.0, 1.0))
    return value, bool(a_ab > 0.5)


def eta_upper(a_ac: float) -> tuple[float, bool]:
    """Upper bound on Bob's sharpness from Charlie's success rate.

    Nontrivial inside ``[(1 + sqrt(3)/9)/2, (1 + sqrt(3)/3)/2]``; outside that
    window the bound is vacuous and ``(1.0, False)`` is returned.
    """
    if not 0.0 <= a_ac <= 1.0:
        raise DomainError(f"A_AC must lie in [0, 1], got {a_ac}")
    if not AC_AT_SHARP - RADICAND_SLACK <= a_ac <= AC_MAX + RADICAND_SLACK:
        return 1.0, False
    first = 6 * SQRT3 * a_ac - 3 * SQRT3 + 1
    second = -2 * SQRT3 * a_ac + SQRT3 + 1
    value = 0.5 * float(_clamped_sqrt(3 * first * second, "eta_upper"))
    return float(np.clip(value, 0.0, 1.0)), True


@dataclass(frozen=True)
class CertInterval:
    """Certified range ``[eta_lo, eta_hi]`` for Bob's sharpness."""

    eta_lo: float
    eta_hi: float
    lo_nontrivial: bool
    hi_nontrivial: bool

    @property
    def width(self) -> float:
        return self.eta_hi - self.eta_lo

    def to_dict(self) -> dict:
        return asdict(self)


def certify(a_ab: float, a_ac: float) -> CertInterval:
    """Combine :func:`eta_lower` and :func:`eta_upper`.

    Raises :class:`InfeasibleStatistics` when the lower bound exceeds the upper
    one by more than ``1e-6``.
    """
    lo, lo_flag = eta_lower(a_ab)
    hi, hi_flag = eta_upper(a_ac)
    if lo > hi + FEASIBILITY_TOL:
        raise InfeasibleStatistics(
            f"no sharpness is compatible with (A_AB, A_AC) = ({a_ab}, {a_ac}): "
            f"lower bound {lo:.6f} exceeds upper bound {hi:.6f}"
        )
    return CertInterval(lo, hi, lo_flag, hi_flag)


def double_violation(a_ab, a_ac, threshold: float = CLASSICAL_MAX):
    """True where both witnesses beat the classical value."""
    return np.logical_and(np.asarray(a_ab) > threshold, np.asarray(a_ac) > threshold)


def witness_report(s: Strategy, tol: float = 1e-6) -> dict:
    """JSON-ready summary: witnesses, certified interval and self-test residuals."""
    from .selftest import canonicalize

    a_ab, a_ac = witness_pair(s)
    report = {"a_ab": a_ab, "a_ac": a_ac}
    try:
        cert = certify(min(max(a_ab, 0.0), 1.0), min(max(a_ac, 0.0), 1.0))
        report.update(
            eta_lo=cert.eta_lo,
            eta_hi=cert.eta_hi,
            flags={"lo_nontrivial": cert.lo_nontrivial, "hi_nontrivial": cert.hi_nontrivial},
        )
    except InfeasibleStatistics:
        report.update(eta_lo=None, eta_hi=None, flags={"infeasible": True})
    report["residuals"] = canonicalize(s, tol).residuals
    return report
