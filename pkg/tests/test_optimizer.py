import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqrac import optimizer as opt
from seqrac.errors import DomainError
from seqrac.scenario import SIGNS, AB_MAX, luders_instrument_set, random_strategy
from seqrac.witnesses import ac_from_eta, ab_from_eta, tradeoff_bound, witness_pair

from helpers import random_effect

S3 = np.sqrt(3)
angle = st.floats(0, np.pi / 2)


def test_param_examples():
    p = opt.ParamPoint.symmetric(1 / S3)
    assert opt.ab_param(p) == pytest.approx(2 / 3, abs=1e-12)
    assert opt.ac_param(p) == pytest.approx(ac_from_eta(1 / S3), abs=1e-12)
    sharp = opt.ParamPoint.symmetric(1.0)
    assert opt.ab_param(sharp) == pytest.approx(AB_MAX, abs=1e-12)
    assert opt.ac_param(sharp) == pytest.approx(0.5 * (1 + S3 / 9), abs=1e-12)
    # mu = 0 puts every preparation on the z axis
    p = opt.ParamPoint(0.0, 0.3, 0.2, 0.4, 0.0)
    assert opt.ab_param(p) == pytest.approx(0.5 + 1 / 6, abs=1e-12)


def test_param_point_domain():
    with pytest.raises(DomainError):
        opt.ParamPoint(2.0, 0, 0, 0, 0)


@settings(max_examples=60, deadline=None)
@given(angle, angle, angle, angle, angle)
def test_param_strategy_realises_closed_forms(mu, phi, p0, p1, p2):
    p = opt.ParamPoint(mu, phi, p0, p1, p2)
    a_ab, a_ac = witness_pair(opt.param_strategy(p))
    assert abs(a_ab - opt.ab_param(p)) < 1e-10
    assert abs(a_ac - opt.ac_param(p)) < 1e-10


def test_gamma_vectors_of_cube():
    assert np.allclose(opt.gamma_vectors(SIGNS / S3), 4 / S3 * np.eye(3))


def test_t_bound_direct_matches_closed():
    rng = np.random.default_rng(0)
    for _ in range(300):
        effects = np.stack([np.stack([e, np.eye(2) - e]) for e in (random_effect(rng) for _ in range(3))])
        s = rng.normal(size=(3, 3))
        assert abs(opt.t_bound(effects, s) - opt.t_bound_closed(effects, s)) < 1e-9


def test_max_t_closed_matches_axis_instruments():
    s = np.diag([1.1, 0.7, 1.9])
    for eta in (0.0, 0.3, 1.0):
        got = opt.t_bound(luders_instrument_set(eta), s)
        want = opt.max_t_closed(np.diag(s), [eta] * 3)
        assert got == pytest.approx(want, abs=1e-10)


def test_relaxed_ac_is_exact_for_symmetric_family():
    for eta in (0.0, 0.4, 1.0):
        p = opt.ParamPoint.symmetric(eta)
        ts = eta * np.eye(3)
        assert opt.relaxed_ac(opt.param_bloch(p), np.zeros(3), ts) == pytest.approx(
            ac_from_eta(eta), abs=1e-12
        )


def test_relaxed_ac_dominates_realised_value():
    for seed in range(40):
        s = random_strategy(seed)
        params = [ins.params() for ins in s.instruments]
        alphas = np.array([a for a, _ in params])
        ts = np.stack([t for _, t in params])
        relaxed = opt.relaxed_ac(s.bloch_vectors(), alphas, ts)
        assert relaxed >= witness_pair(s)[1] - 1e-12


def test_reduction_certificate_examples():
    cert = opt.reduction_certificate(opt.ParamPoint.symmetric(0.5))
    assert cert.holds
    assert cert.phi == pytest.approx(np.arccos(0.5), abs=1e-9)
    assert cert.slacks["full"] == pytest.approx(0, abs=1e-12)


def test_reduction_chain_on_random_points():
    rng = np.random.default_rng(1)
    angles = rng.uniform(0, np.pi / 2, size=(100_000, 5))
    slacks = opt.reduction_slacks(angles)
    for name, values in slacks.items():
        assert values.max() <= 1e-12, name


def test_reduction_vectorised_matches_scalar():
    rng = np.random.default_rng(2)
    angles = rng.uniform(0, np.pi / 2, size=(20, 5))
    vec = opt.reduction_slacks(angles)
    for i, row in enumerate(angles):
        cert = opt.reduction_certificate(opt.ParamPoint(*row))
        for key, value in cert.slacks.items():
            assert value == pytest.approx(vec[key][i], abs=1e-14)


@settings(max_examples=200)
@given(angle, angle, angle, angle, angle)
def test_param_family_never_beats_curve(mu, phi, p0, p1, p2):
    p = opt.ParamPoint(mu, phi, p0, p1, p2)
    a_ab = opt.ab_param(p)
    if a_ab >= 0.5:
        assert opt.ac_param(p) <= tradeoff_bound(min(a_ab, AB_MAX)) + 1e-12


@pytest.mark.parametrize("target", [0.5, 0.62, 0.7, 0.78, AB_MAX])
def test_maximize_ac_param_mode(target):
    r = opt.maximize_ac(target, budget=20_000, seed=3)
    assert r.evaluations <= 20_000
    assert -1e-12 <= r.gap < 1e-4
    assert opt.ab_param(r.argmax) == pytest.approx(target, abs=1e-12)
    assert not r.exceeds_bound


def test_maximize_ac_respects_budget_and_seed():
    a = opt.maximize_ac(0.65, budget=777, seed=5)
    b = opt.maximize_ac(0.65, budget=777, seed=5)
    assert a.evaluations == 777
    assert a.best_ac == b.best_ac


def test_maximize_ac_rejects_bad_input():
    with pytest.raises(DomainError):
        opt.maximize_ac(0.9)
    with pytest.raises(DomainError):
        opt.maximize_ac(0.6, budget=0)
    with pytest.raises(ValueError):
        opt.maximize_ac(0.6, mode="nope")


def test_general_mode_reports_exceeding_the_curve():
    # the relaxed objective leaves the unsharp family and can pass the curve
    r = opt.maximize_ac(0.78, budget=20_000, mode="general", seed=0)
    assert r.ab_achieved == pytest.approx(0.78, abs=1e-12)
    assert r.exceeds_bound
    assert r.gap < 0


def test_general_mode_at_the_ends():
    top = opt.maximize_ac(AB_MAX, budget=2_000, mode="general", seed=0)
    assert top.best_ac == pytest.approx(tradeoff_bound(AB_MAX), abs=1e-6)
    bottom = opt.maximize_ac(0.5, budget=5_000, mode="general", seed=0)
    assert bottom.best_ac == pytest.approx(ab_from_eta(1.0), abs=1e-4)


def test_general_mode_finds_the_commuting_corner():
    # (3/4, 3/4) is realised by a commuting qubit strategy, well above the curve
    r = opt.maximize_ac(0.75, budget=10_000, mode="general", seed=0)
    assert r.best_ac >= 0.75 - 1e-9
    assert r.exceeds_bound
