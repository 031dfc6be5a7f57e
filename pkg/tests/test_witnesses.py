import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqrac import witnesses as w
from seqrac.classical import majority_strategy
from seqrac.errors import DomainError, InfeasibleStatistics
from seqrac.scenario import (
    X_BITS,
    BinaryInstrument,
    Strategy,
    apply_visibility,
    ideal_strategy,
    joint_table,
    measurements_from_params,
    preparations_from_bloch,
    random_strategy,
)

S3 = np.sqrt(3)
ETAS = np.linspace(0, 1, 101)


def test_tradeoff_bound_examples():
    assert w.tradeoff_bound(0.5) == pytest.approx(0.5 + S3 / 6, abs=1e-12)
    assert w.tradeoff_bound(w.AB_MAX) == pytest.approx(0.5 * (1 + S3 / 9), abs=1e-12)
    assert w.tradeoff_bound(2 / 3) == pytest.approx(0.753360, abs=1e-6)
    with pytest.raises(DomainError):
        w.tradeoff_bound(0.8)
    with pytest.raises(DomainError):
        w.tradeoff_bound(0.4)


def test_tradeoff_bound_tolerates_edge_dust():
    assert w.tradeoff_bound(w.AB_MAX + 1e-12) == pytest.approx(w.AC_AT_SHARP)


# the curve has infinite slope at AB_MAX: one ulp below eta = 1 the rounding
# of A_AB alone moves the bound by ~3e-9, so the open interval stops short
@given(st.floats(0, 1 - 1e-12))
def test_closed_forms_lie_on_curve(eta):
    assert abs(w.tradeoff_bound(w.ab_from_eta(eta)) - w.ac_from_eta(eta)) < 1e-9


def test_closed_forms_meet_curve_at_sharp_end():
    assert abs(w.tradeoff_bound(w.ab_from_eta(1.0)) - w.ac_from_eta(1.0)) < 1e-9


def test_curve_is_decreasing():
    a = np.linspace(0.5, w.AB_MAX, 500)
    assert np.all(np.diff(w.tradeoff_bound(a)) < 0)


def test_ideal_family_matches_closed_forms_on_grid():
    for eta in ETAS:
        t = joint_table(ideal_strategy(eta))
        a_ab, a_ac = w.witness_ab(t), w.witness_ac(t)
        assert abs(a_ab - w.ab_from_eta(eta)) < 1e-9
        assert abs(a_ac - w.ac_from_eta(eta)) < 1e-9
        assert abs(a_ac - w.tradeoff_bound(a_ab)) < 1e-9


def test_direct_witness_agrees_with_table():
    for seed in range(50):
        s = random_strategy(seed)
        assert abs(w.witness_ab_direct(s) - w.witness_ab(joint_table(s))) < 1e-12


def test_paper_points():
    a_ab, a_ac = w.witness_pair(ideal_strategy(1 / S3))
    assert a_ab == pytest.approx(2 / 3, abs=1e-12)
    assert a_ac == pytest.approx(0.753360, abs=5e-7)
    a_ab, a_ac = w.witness_pair(ideal_strategy(1.0))
    assert a_ab == pytest.approx(0.788675, abs=1e-6)
    assert a_ac == pytest.approx(0.596225, abs=1e-6)


def test_eta_bounds_examples():
    assert w.eta_lower(0.5) == (0.0, False)
    assert w.eta_lower(w.AB_MAX)[0] == pytest.approx(1.0)
    assert w.eta_upper(0.5) == (1.0, False)
    assert w.eta_upper(w.AC_AT_SHARP)[0] == pytest.approx(1.0, abs=1e-9)
    assert w.eta_upper(w.AC_MAX) == (0.0, True)
    with pytest.raises(DomainError):
        w.eta_lower(1.2)
    with pytest.raises(DomainError):
        w.eta_upper(-0.1)


def test_certify_noisy_example():
    c = w.certify(0.6425, 0.7156)
    assert c.eta_lo == pytest.approx(0.4936, abs=1e-4)
    assert c.eta_hi == pytest.approx(0.7844, abs=1e-3)
    assert c.lo_nontrivial and c.hi_nontrivial
    assert set(c.to_dict()) == {"eta_lo", "eta_hi", "lo_nontrivial", "hi_nontrivial"}


def test_certify_at_uninformative_point():
    c = w.certify(0.5, 0.788675)
    assert c.eta_lo == 0.0
    # six-digit rounding of the maximum moves the square root by ~1e-3
    assert c.eta_hi < 2e-3
    assert not c.lo_nontrivial
    assert w.certify(0.5, w.AC_MAX).eta_hi == 0.0


@pytest.mark.parametrize("eta", np.linspace(0.05, 0.95, 19))
def test_certify_collapses_on_curve(eta):
    c = w.certify(w.ab_from_eta(eta), w.ac_from_eta(eta))
    assert c.width <= 1e-9
    assert c.eta_lo == pytest.approx(eta, abs=1e-9)


def test_certify_rejects_infeasible_pair():
    with pytest.raises(InfeasibleStatistics):
        w.certify(0.78, 0.78)


def test_noisy_ideal_strategy_is_certified():
    s = apply_visibility(ideal_strategy(1 / S3), 0.95, 0.90, 0.95)
    a_ab, a_ac = w.witness_pair(s)
    c = w.certify(a_ab, a_ac)
    assert c.eta_lo <= 0.9 / S3 + 1e-12 <= c.eta_hi


@settings(max_examples=200)
@given(st.floats(0, 1))
def test_certify_contains_true_sharpness(eta):
    c = w.certify(w.ab_from_eta(eta), w.ac_from_eta(eta))
    assert c.eta_lo - 1e-6 <= eta <= c.eta_hi + 1e-6


def test_double_violation():
    assert not w.double_violation(0.75, 0.75)
    assert w.double_violation(0.76, 0.76)
    assert not np.any(w.double_violation(w.ab_from_eta(ETAS), w.ac_from_eta(ETAS)))


def test_classical_point_sits_above_unsharp_curve():
    # the curve bounds the unsharp family, not every qubit strategy: the
    # classical corner is reachable with commuting qubit operators
    assert majority_strategy().witnesses() == (0.75, 0.75)
    z = np.array([0.0, 0.0, 1.0])
    majority = np.where(X_BITS.sum(axis=1) >= 2, -1.0, 1.0)
    s = Strategy(
        preparations_from_bloch(majority[:, None] * z),
        tuple(BinaryInstrument.from_effect(0.0, z) for _ in range(3)),
        measurements_from_params([(0.0, z)] * 3),
    )
    a_ab, a_ac = w.witness_pair(s)
    assert a_ab == pytest.approx(0.75, abs=1e-12)
    assert a_ac == pytest.approx(0.75, abs=1e-12)
    assert a_ac > w.tradeoff_bound(a_ab) + 0.05


def test_witness_report_keys():
    report = w.witness_report(ideal_strategy(0.5))
    assert set(report) >= {"a_ab", "a_ac", "eta_lo", "eta_hi", "flags", "residuals"}
    assert report["eta_lo"] == pytest.approx(0.5, abs=1e-9)
