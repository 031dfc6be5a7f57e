"""Closed-form 2x2 linear algebra for qubit states, effects and Kraus operators.

Everything here works on plain ``numpy`` arrays of shape ``(2, 2)`` (complex)
and real Bloch 3-vectors.  Eigenvalues come from the explicit characteristic
polynomial rather than an iterative solver so the hot loops of the optimisers
stay exact and cheap.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidOperator

TOL = 1e-9
ALG_TOL = 1e-10
DEGENERATE_GAP = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SX, SY, SZ])

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_I = np.array([1, 1j], dtype=complex) / np.sqrt(2)


def dag(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a.conj(), -1, -2)


def pauli_dot(v) -> np.ndarray:
    """Return ``v . sigma`` for a real 3-vector (or a stack of them)."""
    v = np.asarray(v, dtype=float)
    return np.tensordot(v, PAULI, axes=([-1], [0]))


def _check_square2(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidOperator(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidOperator("matrix has non-finite entries")
    return m


def is_hermitian(m: np.ndarray, tol: float = TOL) -> bool:
    return bool(np.max(np.abs(m - dag(m))) <= tol)


def check_hermitian(m, tol: float = TOL) -> np.ndarray:
    m = _check_square2(m)
    if not is_hermitian(m, tol):
        raise InvalidOperator("matrix is not Hermitian")
    return m


def check_state(rho, tol: float = TOL) -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    rho = check_hermitian(rho, tol)
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvalidOperator(f"state has trace {np.trace(rho).real!r}, expected 1")
    lam_plus, lam_minus = eigvals2(rho)
    if lam_minus < -tol:
        raise InvalidOperator(f"state has negative eigenvalue {lam_minus:.3e}")
    return rho


def check_effect(e, tol: float = TOL) -> np.ndarray:
    """Validate a POVM element: Hermitian with spectrum in [0, 1]."""
    e = check_hermitian(e, tol)
    lam_plus, lam_minus = eigvals2(e)
    if lam_minus < -tol or lam_plus > 1 + tol:
        raise InvalidOperator(
            f"effect spectrum ({lam_minus:.3e}, {lam_plus:.3e}) outside [0, 1]"
        )
    return e


def state_from_bloch(r) -> np.ndarray:
    """Density matrix ``(I + r.sigma)/2``; rejects ``|r| > 1 + TOL``."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise InvalidOperator(f"Bloch vector must have 3 components, got {r.shape}")
    norm = float(np.linalg.norm(r))
    if norm > 1 + TOL:
        raise InvalidOperator(f"Bloch vector length {norm:.6g} exceeds 1")
    return 0.5 * (I2 + pauli_dot(r))


def bloch_from_state(rho) -> np.ndarray:
    """Inverse of :func:`state_from_bloch`: ``r_k = tr(rho sigma_k)``."""
    rho = check_state(rho)
    return bloch_of(rho)


def bloch_of(m: np.ndarray) -> np.ndarray:
    """Pauli coefficients ``tr(m sigma_k)`` without validation; works on stacks."""
    m = np.asarray(m)
    return np.einsum("...ij,kji->...k", m, PAULI).real


def identity_part(m: np.ndarray) -> np.ndarray:
    """Half-trace of ``m`` (the coefficient of I in the Pauli expansion)."""
    return 0.5 * np.trace(m, axis1=-2, axis2=-1).real


def eigvals2(h: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a 2x2 Hermitian matrix from the characteristic polynomial."""
    a = h[0, 0].real
    d = h[1, 1].real
    b = h[0, 1]
    mean = 0.5 * (a + d)
    radius = np.hypot(0.5 * (a - d), abs(b))
    return float(mean + radius), float(mean - radius)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Normalise and rotate the global phase so the first nonzero entry is real positive."""
    v = v / np.linalg.norm(v)
    k = 0 if abs(v[0]) > 1e-14 else 1
    return v * (abs(v[k]) / v[k])


def complement(v: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to ``v`` with the canonical phase."""
    return _phase_fix(np.array([-np.conj(v[1]), np.conj(v[0])]))


def eig2(h) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Eigen-decomposition ``(lam_plus, lam_minus, v_plus, v_minus)`` of a Hermitian 2x2.

    Degenerate spectra (gap below 1e-12) return the computational basis.
    ``v_minus`` is always the canonical complement of ``v_plus``.
    """
    h = check_hermitian(h)
    lam_plus, lam_minus = eigvals2(h)
    if lam_plus - lam_minus < DEGENERATE_GAP:
        return lam_plus, lam_minus, KET0.copy(), KET1.copy()
    a = h[0, 0].real
    d = h[1, 1].real
    b = h[0, 1]
    # two algebraically equivalent null vectors of (h - lam I); keep the better conditioned
    u = np.array([b, lam_plus - a])
    w = np.array([lam_plus - d, np.conj(b)])
    v = u if np.linalg.norm(u) >= np.linalg.norm(w) else w
    v_plus = _phase_fix(v)
    return lam_plus, lam_minus, v_plus, complement(v_plus)


def sqrt_psd(e) -> np.ndarray:
    """Positive square root of a PSD 2x2 matrix.

    Uses ``sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M))``, which
    needs no eigenvectors and returns projectors unchanged.
    """
    e = check_hermitian(e)
    lam_plus, lam_minus = eigvals2(e)
    if lam_minus < -TOL:
        raise InvalidOperator(f"matrix has negative eigenvalue {lam_minus:.3e}")
    e = 0.5 * (e + dag(e))
    if lam_plus <= 0.0:
        return np.zeros((2, 2), dtype=complex)
    det = max(lam_plus, 0.0) * max(lam_minus, 0.0)
    root_det = np.sqrt(det)
    scale = np.sqrt(max(lam_plus, 0.0) + max(lam_minus, 0.0) + 2 * root_det)
    return (e + root_det * I2) / scale


def polar_decompose(k) -> tuple[np.ndarray, np.ndarray]:
    """Left polar decomposition ``K = U P`` with ``P = sqrt(K^dag K)``.

    The unitary is assembled column by column, ``U v_i = w_i``, from the
    right-singular vectors ``v_i``.  ``w_1 = K v_1 / |K v_1|``; ``w_2`` is the
    complement of ``w_1`` carrying the phase of ``K v_2``.  For singular
    ``K`` that phase is undefined and the canonical complement (first nonzero
    entry real positive) is used, which keeps the completion deterministic.
    """
    k = _check_square2(k)
    gram = dag(k) @ k
    lam_plus, _, v1, v2 = eig2(0.5 * (gram + dag(gram)))
    s_plus = np.sqrt(max(lam_plus, 0.0))
    if s_plus <= DEGENERATE_GAP:
        return I2.copy(), np.zeros((2, 2), dtype=complex)
    # the small singular value from the determinant keeps full relative accuracy
    s_minus = abs(np.linalg.det(k)) / s_plus
    p = s_plus * np.outer(v1, v1.conj()) + s_minus * np.outer(v2, v2.conj())
    w1 = k @ v1
    w1 = w1 / np.linalg.norm(w1)
    w2 = complement(w1)
    overlap = np.vdot(w2, k @ v2)
    if abs(overlap) > DEGENERATE_GAP:
        w2 = w2 * (overlap / abs(overlap))
    u = np.outer(w1, v1.conj()) + np.outer(w2, v2.conj())
    return u, p


def lambda_max_kernel(b, a) -> float:
    """Largest eigenvalue of ``sqrt(B) (a.sigma) sqrt(B)``, computed directly."""
    root = sqrt_psd(check_effect(b))
    m = root @ pauli_dot(a) @ root
    return eigvals2(0.5 * (m + dag(m)))[0]


def lambda_max_closed(c, r, a):
    """Closed form of :func:`lambda_max_kernel` for ``B = c I + r.sigma``.

    ``lam = r.a + sqrt((r.a)^2 + |a|^2 (c^2 - |r|^2))``.  Broadcasts over
    leading axes of ``c``, ``r`` and ``a``.  Summed over the two outcomes of a
    binary POVM the linear terms cancel, leaving
    ``(|a|/2) sqrt((1 +- alpha)^2 - |t|^2 (1 - (t_hat.a_hat)^2))`` per outcome.
    """
    c = np.asarray(c, dtype=float)
    r = np.asarray(r, dtype=float)
    a = np.asarray(a, dtype=float)
    ra = np.sum(r * a, axis=-1)
    disc = ra * ra + np.sum(a * a, axis=-1) * (c * c - np.sum(r * r, axis=-1))
    return ra + np.sqrt(np.maximum(disc, 0.0))


def effect_from_params(alpha: float, t, b: int = 0) -> np.ndarray:
    """Outcome-``b`` element of the binary POVM with observable ``alpha I + t.sigma``."""
    sign = 1.0 if b == 0 else -1.0
    return 0.5 * ((1 + sign * alpha) * I2 + sign * pauli_dot(t))


def observable_params(b0: np.ndarray) -> tuple[float, np.ndarray]:
    """``(alpha, t)`` of the observable ``B0 - B1 = 2 B0 - I``."""
    obs = 2 * np.asarray(b0) - I2
    return float(identity_part(obs)), bloch_of(obs) / 2


def su2_from_rotation(rot) -> np.ndarray:
    """SU(2) element ``U`` with ``U (v.sigma) U^dag = (R v).sigma``."""
    from scipy.spatial.transform import Rotation

    x, y, z, w = Rotation.from_matrix(np.asarray(rot, dtype=float)).as_quat()
    return w * I2 - 1j * (x * SX + y * SY + z * SZ)


def rotation_from_su2(u) -> np.ndarray:
    """Adjoint action of ``U`` on Bloch vectors (inverse of :func:`su2_from_rotation`)."""
    u = np.asarray(u, dtype=complex)
    rotated = u @ PAULI @ dag(u)
    return bloch_of(rotated).T / 2


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary (QR with phase correction)."""
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_direction(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)
