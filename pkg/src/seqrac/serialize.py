"""JSON interchange format for strategies.

Layout::

    {
      "preparations": [[rx, ry, rz], ... eight Bloch vectors],
      "instruments": [
        {"alpha": a, "t": [tx, ty, tz], "U": [[re, im] x 4], "U1": [[re, im] x 4]},
        ... three settings
      ],
      "measurements": [{"alpha": a, "t": [tx, ty, tz]}, ... three settings]
    }

Bob's Kraus operators are ``K_b = U_b sqrt(B_b)`` with ``B_b`` the POVM of
the observable ``alpha I + t.sigma``.  ``U`` is the outcome-0 unitary and the
optional ``U1`` the outcome-1 unitary (defaults to ``U``).  Unitaries are
row-major with complex entries written as ``[re, im]``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import qubit
from .errors import InvalidOperator, StrategyFormatError
from .scenario import BinaryInstrument, Strategy, measurements_from_params, preparations_from_bloch


def _encode_unitary(u: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(u).ravel()]


def strategy_to_dict(s: Strategy) -> dict:
    instruments = []
    for ins in s.instruments:
        alpha, t = ins.params()
        u0, u1 = ins.unitaries()
        entry = {"alpha": alpha, "t": [float(v) for v in t], "U": _encode_unitary(u0)}
        if np.max(np.abs(u0 - u1)) > 1e-15:
            entry["U1"] = _encode_unitary(u1)
        instruments.append(entry)
    measurements = []
    for z in range(3):
        alpha, t = qubit.observable_params(s.measurements[z, 0])
        measurements.append({"alpha": alpha, "t": [float(v) for v in t]})
    return {
        "preparations": [[float(v) for v in r] for r in s.bloch_vectors()],
        "instruments": instruments,
        "measurements": measurements,
    }


def dumps(s: Strategy) -> str:
    return json.dumps(strategy_to_dict(s), indent=2) + "\n"


def _vector(value, where: str, length: int = 3) -> np.ndarray:
    if not isinstance(value, list) or len(value) != length:
        raise StrategyFormatError(where, f"expected a list of {length} numbers")
    try:
        out = np.array([float(v) for v in value])
    except (TypeError, ValueError):
        raise StrategyFormatError(where, "entries must be numbers") from None
    if not np.all(np.isfinite(out)):
        raise StrategyFormatError(where, "entries must be finite")
    return out


def _field(obj, key: str, where: str):
    if not isinstance(obj, dict):
        raise StrategyFormatError(where, "expected an object")
    if key not in obj:
        raise StrategyFormatError(f"{where}.{key}", "missing field")
    return obj[key]


def _unitary(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 4:
        raise StrategyFormatError(where, "expected four [re, im] pairs")
    entries = [_vector(z, f"{where}[{i}]", 2) for i, z in enumerate(value)]
    u = np.array([re + 1j * im for re, im in entries]).reshape(2, 2)
    if np.max(np.abs(qubit.dag(u) @ u - qubit.I2)) > 1e-8:
        raise StrategyFormatError(where, "matrix is not unitary")
    return u


def _scalar(value, where: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise StrategyFormatError(where, "expected a number") from None
    if not np.isfinite(out):
        raise StrategyFormatError(where, "expected a finite number")
    return out


def strategy_from_dict(doc: dict) -> Strategy:
    preps = _field(doc, "preparations", "$")
    if not isinstance(preps, list) or len(preps) != 8:
        raise StrategyFormatError("$.preparations", "expected eight Bloch vectors")
    bloch = [_vector(v, f"$.preparations[{i}]") for i, v in enumerate(preps)]
    for i, r in enumerate(bloch):
        if np.linalg.norm(r) > 1 + qubit.TOL:
            raise StrategyFormatError(f"$.preparations[{i}]", "Bloch vector longer than 1")

    entries = _field(doc, "instruments", "$")
    if not isinstance(entries, list) or len(entries) != 3:
        raise StrategyFormatError("$.instruments", "expected three instruments")
    instruments = []
    for y, entry in enumerate(entries):
        where = f"$.instruments[{y}]"
        alpha = _scalar(_field(entry, "alpha", where), f"{where}.alpha")
        t = _vector(_field(entry, "t", where), f"{where}.t")
        u0 = _unitary(entry["U"], f"{where}.U") if "U" in entry else qubit.I2
        u1 = _unitary(entry["U1"], f"{where}.U1") if "U1" in entry else u0
        try:
            instruments.append(BinaryInstrument.from_effect(alpha, t, (u0, u1)))
        except InvalidOperator as exc:
            raise StrategyFormatError(where, str(exc)) from None

    meas = _field(doc, "measurements", "$")
    if not isinstance(meas, list) or len(meas) != 3:
        raise StrategyFormatError("$.measurements", "expected three measurements")
    params = []
    for z, entry in enumerate(meas):
        where = f"$.measurements[{z}]"
        params.append(
            (
                _scalar(_field(entry, "alpha", where), f"{where}.alpha"),
                _vector(_field(entry, "t", where), f"{where}.t"),
            )
        )
    try:
        return Strategy(
            preparations_from_bloch(bloch), tuple(instruments), measurements_from_params(params)
        )
    except InvalidOperator as exc:
        raise StrategyFormatError("$", str(exc)) from None


def loads(text: str) -> Strategy:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StrategyFormatError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return strategy_from_dict(doc)


def load(path) -> Strategy:
    return loads(Path(path).read_text())


def save(s: Strategy, path) -> None:
    Path(path).write_text(dumps(s))
