"""Check whether a strategy equals the ideal one up to a collective unitary.

The frame is built directly from Bob's observable directions: an orthogonal
Procrustes fit finds the rotation ``R`` that best maps ``t_y`` onto
``eta e_y``.  A reflection (``det < 0``) cannot come from a unitary, so the
strategy is complex-conjugated first, which mirrors the Bloch y-axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qubit
from .scenario import IDEAL_BLOCH, Strategy, ideal_measurements
from .qubit import I2

ETA_FLOOR = 1e-6


@dataclass
class SelfTestReport:
    passed: bool
    eta: float
    conjugated: bool
    unitary: np.ndarray = field(repr=False)
    residuals: dict = field(default_factory=dict)
    prep_residuals: np.ndarray = field(default=None, repr=False)

    @property
    def worst(self) -> tuple[str, float]:
        key = max(self.residuals, key=self.residuals.get)
        return key, self.residuals[key]

    def to_dict(self) -> dict:
        return {
            "status": "PASS" if self.passed else "FAIL",
            "eta": self.eta,
            "conjugated": self.conjugated,
            "residuals": self.residuals,
            "preparation_residuals": [float(r) for r in self.prep_residuals],
            "worst": {"component": self.worst[0], "residual": self.worst[1]},
        }


def _procrustes(m: np.ndarray) -> np.ndarray:
    """Orthogonal ``R`` maximising ``tr(R M)``."""
    w, _, vt = np.linalg.svd(m)
    return vt.T @ w.T


def _frame(s: Strategy) -> tuple[np.ndarray, float]:
    t = np.stack([ins.params()[1] for ins in s.instruments], axis=1)  # columns t_y
    r = _procrustes(t)
    eta = float(np.trace(r @ t)) / 3
    if eta < ETA_FLOOR:
        # Bob does not touch the qubit; orient by Alice's signed sums instead
        from .optimizer import gamma_vectors

        r = _procrustes(gamma_vectors(s.preparations).T)
        eta = 0.0
    return r, eta


def canonicalize(s: Strategy, tol: float = 1e-6) -> SelfTestReport:
    """Strip the collective unitary (and complex conjugation) and compare to the ideal.

    Residuals are maximum absolute deviations:

    * ``preparations``: Bloch vectors against the cube states;
    * ``bob_axes``: ``t_y`` against ``eta e_y``; ``bob_bias``: ``|alpha_y|``;
    * ``bob_relay``: ``K^dag C_{0|z} K`` against ``sqrt(B) V_z sqrt(B)`` with
      ``V_z`` the ideal projectors, i.e. how far Bob's unitaries are from
      the identity on the support that matters to Charlie;
    * ``charlie``: Charlie's ``C_{0|z}`` against ``|+><+|, |i><i|, |0><0|``.
    """
    r, eta = _frame(s)
    conjugated = False
    if np.linalg.det(r) < 0:
        s = s.conjugate()
        conjugated = True
        r, eta = _frame(s)
    u = qubit.su2_from_rotation(r)
    c = s.rotate(u)

    prep_res = np.linalg.norm(c.bloch_vectors() - IDEAL_BLOCH, axis=1)
    axes, bias, relay = 0.0, 0.0, 0.0
    ideal = ideal_measurements()
    for y, ins in enumerate(c.instruments):
        alpha, t = ins.params()
        axes = max(axes, float(np.max(np.abs(t - eta * np.eye(3)[y]))))
        bias = max(bias, abs(alpha))
        for b in range(2):
            k = ins.kraus[b]
            root = qubit.sqrt_psd(ins.effects[b])
            for z in range(3):
                got = qubit.dag(k) @ c.measurements[z, 0] @ k
                want = root @ ideal[z, 0] @ root
                relay = max(relay, float(np.max(np.abs(got - want))))
    charlie = float(np.max(np.abs(c.measurements - ideal)))
    residuals = {
        "preparations": float(prep_res.max()),
        "bob_axes": axes,
        "bob_bias": bias,
        "bob_relay": relay,
        "charlie": charlie,
    }
    passed = all(v < tol for v in residuals.values())
    return SelfTestReport(passed, eta, conjugated, u, residuals, prep_res)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(qubit.dag(u) @ u - I2)) < tol)
