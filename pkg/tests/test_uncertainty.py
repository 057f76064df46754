import itertools
import math

import numpy as np
import pytest
from pytest import raises

from bicoherent import uncertainty
from bicoherent.model import PhysicalInputs, derive_params
from bicoherent.series import g_bundle
from bicoherent.states import CoherentLabel
from bicoherent.uncertainty import (NONTRIVIAL_PAIRS, PAIRS, VarianceError,
                                    commutator_means, commutator_rhs,
                                    feasibility_conditions, first_moments,
                                    gur_report, make_report,
                                    saturation_excess, scan_violations,
                                    variances_closed_form,
                                    zero_phase_products)


def _a(J, q):
    return 1 - (1 - q * q) * J


def test_vacuum_variances(unit_params):
    v = variances_closed_form(CoherentLabel(), unit_params)
    assert v.chi1 == v.chi2 == pytest.approx(0.5)
    assert v.kappa1 == v.kappa2 == pytest.approx(0.5)
    means = first_moments(CoherentLabel(), unit_params)
    assert tuple(means) == (0.0, 0.0, 0.0, 0.0)


def test_zero_phase_variance_formula():
    q, J1, J2 = 0.7, 0.3, 0.6
    p = derive_params(PhysicalInputs(q=q, theta=0.4, hbar=1.3))
    v = variances_closed_form(CoherentLabel(J1, 0.0, J2, 0.0), p)
    L2 = p.Lambda ** 2
    chi = p.hbar ** 2 * (p.K1 * _a(J1, q) + p.K2 * _a(J2, q)) / (4 * L2)
    kappa = (p.lambda2 ** 2 * p.K1 * _a(J1, q)
             + p.lambda1 ** 2 * p.K2 * _a(J2, q)) / (4 * L2)
    assert v.chi1 == pytest.approx(chi, rel=1e-12)
    assert v.chi2 == pytest.approx(chi, rel=1e-12)
    assert v.kappa1 == pytest.approx(kappa, rel=1e-12)
    assert v.kappa2 == pytest.approx(kappa, rel=1e-12)


def test_commutators_undeformed():
    theta = 0.7
    p = derive_params(PhysicalInputs(theta=theta, hbar=1.5))
    means = commutator_means(CoherentLabel(0.4, 1.0, 0.2, 2.0), p)
    assert means.X1X2 == pytest.approx(1j * theta, abs=1e-12)
    assert means.X1P1 == pytest.approx(1.5j, abs=1e-12)
    assert means.X2P2 == means.X1P1
    assert abs(means.P1P2) < 1e-12


def test_commutator_rhs_symmetric_at_zero_theta(unit_params):
    rhs = commutator_rhs(CoherentLabel(0.3, 0.0, 0.3, 0.0),
                         unit_params.with_q(0.6))
    assert rhs.X1X2 == 0.0
    assert rhs.P1P2 == 0.0


def test_bounds_independent_of_phases():
    p = derive_params(PhysicalInputs(q=0.6, theta=0.8))
    phases = np.linspace(-math.pi, math.pi, 3)
    bounds = {commutator_rhs(CoherentLabel(0.4, g1, 0.25, g2), p)
              for g1, g2 in itertools.product(phases, phases)}
    assert len(bounds) == 1


@pytest.mark.parametrize('q', [0.5, 0.9, 1.0])
@pytest.mark.parametrize('J1, J2', list(itertools.product([0.1, 0.5],
                                                          repeat=2)))
def test_saturation_at_zero_phase_and_theta(q, J1, J2):
    p = derive_params(PhysicalInputs(q=q))
    reports = {r.pair: r for r in gur_report(CoherentLabel(J1, 0, J2, 0), p)}
    for pair in ('X1P1', 'X2P2'):
        assert abs(reports[pair].ratio - 1) < 1e-10
        assert reports[pair].saturated
    assert saturation_excess(CoherentLabel(J1, 0, J2, 0), p) == 0.0


@pytest.mark.parametrize('q', [0.5, 0.8, 1.0])
def test_excess_at_positive_theta(q):
    p = derive_params(PhysicalInputs(q=q, theta=0.5))
    label = CoherentLabel(0.3, 0.0, 0.45, 0.0)
    reports = {r.pair: r for r in gur_report(label, p)}
    x1p1 = reports['X1P1']
    excess = saturation_excess(label, p)
    assert excess > 0
    assert x1p1.ratio ** 2 - 1 == pytest.approx(excess / x1p1.rhs ** 2,
                                                rel=1e-9, abs=1e-12)
    assert x1p1.satisfied and not x1p1.saturated
    assert all(r.satisfied for r in reports.values())


def test_report_fields(deformed_params):
    reports = gur_report(CoherentLabel(0.3, 1.2, 0.2, -0.7), deformed_params)
    assert [r.pair for r in reports] == list(PAIRS)
    for r in reports:
        assert r.lhs >= 0 and r.rhs >= 0
    cross = reports[PAIRS.index('X1P2')]
    assert cross.rhs == 0.0 and cross.ratio == float('inf')


def test_make_report_tolerance():
    assert make_report('X1P1', 0.5 - 5e-10, 0.5).satisfied
    assert not make_report('X1P1', 0.5 - 1e-8, 0.5).satisfied
    assert make_report('X1P1', 0.5 + 1e-7, 0.5).saturated
    assert not make_report('X1P1', 0.5 + 1e-5, 0.5).saturated
    assert make_report('X1X2', 0.0, 0.0).ratio == 1.0


def test_negative_variance_handling():
    with pytest.warns(RuntimeWarning):
        assert uncertainty._check_variance('chi1', -1e-12) == 0.0
    with raises(VarianceError):
        uncertainty._check_variance('chi1', -1e-6)
    assert uncertainty._check_variance('chi1', 0.25) == 0.25


def test_feasibility_at_zero_phase():
    p = derive_params(PhysicalInputs(q=0.7, theta=0.3))
    feas = feasibility_conditions(CoherentLabel(0.4, 0.0, 0.2, 0.0), p)
    for val in feas:
        assert abs(val) < 1e-12
    assert all(feasibility_conditions(CoherentLabel(), p).holds().values())


def test_feasibility_reassembles_variances():
    q = 0.5
    p = derive_params(PhysicalInputs(q=q, theta=0.6))
    label = CoherentLabel(1.0, 2.0, 1.0, -2.0)
    gb = g_bundle(label, q)
    v = variances_closed_form(label, p, gb=gb)
    feas = feasibility_conditions(label, p, gb=gb)
    K1, K2, l1, l2 = p.K1, p.K2, p.lambda1, p.lambda2
    a1, a2 = _a(1.0, q), _a(1.0, q)
    L2 = p.Lambda ** 2
    hbar2 = p.hbar ** 2
    assert v.chi1 == pytest.approx(hbar2 * (feas.p1 + K1 * a1 + K2 * a2)
                                   / (4 * L2), rel=1e-12)
    assert v.chi2 == pytest.approx(hbar2 * (feas.p2 + K1 * a1 + K2 * a2)
                                   / (4 * L2), rel=1e-12)
    zero_kappa = l2 ** 2 * K1 * a1 + l1 ** 2 * K2 * a2
    assert v.kappa1 == pytest.approx((feas.p3 + zero_kappa) / (4 * L2),
                                     rel=1e-12)
    assert v.kappa2 == pytest.approx((feas.p4 + zero_kappa) / (4 * L2),
                                     rel=1e-12)
    holds = feas.holds()
    if holds['p1'] and holds['p3']:
        x1p1 = gur_report(label, p, gb=gb)[PAIRS.index('X1P1')]
        assert x1p1.satisfied


def test_zero_phase_products():
    p = derive_params(PhysicalInputs(q=0.7, theta=0.5))
    label = CoherentLabel(0.35, 0.0, 0.15, 0.0)
    products = zero_phase_products(label, p)
    for r in gur_report(label, p):
        assert r.lhs ** 2 == pytest.approx(products[r.pair], rel=1e-12)
    moved = zero_phase_products(label.replace(gamma1=1.0), p)
    assert moved == products


def test_scan_finds_no_violation_for_matrix_convention():
    p = derive_params(PhysicalInputs(q=0.5))
    result = scan_violations(1.2, 1.2, p, resolution=5)
    assert result.points == 25
    assert result.invalid == 0
    assert result.witnesses == []
    assert result.min_ratio >= 1 - 1e-6
    assert result.argmin[2] in NONTRIVIAL_PAIRS


def test_scan_explicit_grids():
    p = derive_params(PhysicalInputs(q=0.8, theta=0.2))
    result = scan_violations(0.4, 0.3, p, gamma1_grid=[0.0, 1.0],
                             gamma2_grid=[0.5])
    assert result.points == 2
    assert result.witnesses == []


def test_scan_literal_convention_is_reported():
    p = derive_params(PhysicalInputs(q=0.5))
    result = scan_violations(1.2, 1.2, p, resolution=4,
                             convention='paper-literal')
    assert result.points == 16
    assert result.invalid <= result.points
