import numpy as np
import pytest

from seqrac import qubit
from seqrac.qubit import I2
from seqrac.scenario import Strategy, ideal_strategy, luders_instrument_set, random_strategy
from seqrac.selftest import canonicalize, is_unitary

S3 = np.sqrt(3)


def test_ideal_passes():
    r = canonicalize(ideal_strategy(1 / S3))
    assert r.passed
    assert r.eta == pytest.approx(1 / S3)
    assert not r.conjugated
    assert is_unitary(r.unitary)
    assert r.worst[1] < 1e-12


def test_sharp_instruments_pass():
    assert canonicalize(ideal_strategy(1.0)).passed


@pytest.mark.parametrize("seed", range(10))
def test_rotated_strategy_is_recognised(seed):
    u = qubit.random_unitary(np.random.default_rng(seed))
    r = canonicalize(ideal_strategy(0.6).rotate(u))
    assert r.passed, r.residuals
    assert r.eta == pytest.approx(0.6, abs=1e-10)


def test_conjugated_strategy_is_recognised():
    u = qubit.random_unitary(np.random.default_rng(4))
    s = ideal_strategy(0.6).rotate(u).conjugate()
    r = canonicalize(s)
    assert r.passed
    assert r.conjugated


def test_broken_preparation_is_localised():
    s = ideal_strategy(0.6)
    preps = s.preparations.copy()
    preps[3] = I2 / 2
    r = canonicalize(Strategy(preps, s.instruments, s.measurements))
    assert not r.passed
    assert r.worst[0] == "preparations"
    assert int(np.argmax(r.prep_residuals)) == 3
    assert r.to_dict()["status"] == "FAIL"


def test_non_lueders_relay_is_flagged():
    s = ideal_strategy(0.6)
    twist = qubit.su2_from_rotation(np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float))
    bent = tuple(
        type(ins).from_effect(*ins.params(), unitaries=np.stack([twist, I2])) for ins in s.instruments
    )
    r = canonicalize(Strategy(s.preparations, bent, s.measurements))
    assert not r.passed
    assert r.worst[0] == "bob_relay"


def test_blind_bob_falls_back_to_preparations():
    s = Strategy(ideal_strategy().preparations, luders_instrument_set(0.0), ideal_strategy().measurements)
    r = canonicalize(s)
    assert r.eta == 0.0
    assert r.passed


def test_random_strategies_fail():
    for seed in range(5):
        assert not canonicalize(random_strategy(seed)).passed
