import cmath
import math

import pytest
from hypothesis import given, strategies as st
from pytest import raises

from bicoherent.model import PhysicalInputs, derive_params
from bicoherent.oracle import MatrixOracle
from bicoherent.qmath import DomainError, pick_cutoff
from bicoherent.series import (LADDER_NAMES, BundleRangeError, GBundle,
                               SeriesError, F_q, F_q_joint, g_bundle,
                               ladder_moments, mode_sum, phase_exponents)
from bicoherent.states import (CoherentLabel, CutoffError,
                               build_coherent_vector, normalization_Eq)


actions = st.floats(min_value=0.0, max_value=0.5)
phases = st.floats(min_value=-10.0, max_value=10.0)
qs = st.floats(min_value=0.3, max_value=1.0)


@pytest.mark.parametrize('convention', ['spectral-gap', 'paper-literal'])
def test_zero_phase_is_normalization(convention):
    f = F_q_joint(0.7, 0.4, 0.0, 0.0, 0.6, convention)
    assert f.real == normalization_Eq(0.7, 0.4, 0.6)
    assert f.imag == 0.0


def test_undeformed_closed_form():
    for g1, g2 in ((0.3, 0.0), (1.1, -2.5), (-3.0, 0.7)):
        f = F_q_joint(1.0, 2.0, g1, g2, 1.0)
        expected = cmath.exp(1j * (g1 + g2)) * math.exp(3.0)
        assert abs(f - expected) < 1e-12 * math.exp(3.0)


@given(J1=actions, J2=actions, g1=phases, g2=phases, q=qs)
def test_conjugate_phases(J1, J2, g1, g2, q):
    f = F_q_joint(J1, J2, g1, g2, q)
    assert abs(F_q_joint(J1, J2, -g1, -g2, q) - f.conjugate()) <= 1e-14 * abs(f)


@pytest.mark.parametrize('convention', ['spectral-gap', 'paper-literal'])
def test_direct_sum_matches_product(convention):
    args = (0.7, 0.4, 1.3, -0.2, 0.6, convention)
    a = F_q_joint(*args)
    b = F_q_joint(*args, method='direct')
    assert abs(a - b) < 1e-13 * abs(a)
    with raises(SeriesError):
        F_q_joint(*args, method='trapezoid')


def test_single_mode_phase():
    assert F_q(0.7, 0.4, 1.3, 2, 0.6) == F_q_joint(0.7, 0.4, 0.0, 1.3, 0.6)
    with raises(SeriesError):
        F_q(0.7, 0.4, 1.3, 3, 0.6)
    # the n = 0 term already carries the phase exp(i gamma)
    assert mode_sum(0.5, 2.0, 0.7, 1) == pytest.approx(cmath.exp(2j), abs=1e-15)


def test_phase_exponents():
    assert phase_exponents(4, 1.0).tolist() == [1.0] * 4
    gap = phase_exponents(4, 0.5)
    assert gap[3] == pytest.approx(0.25 ** 3)
    with raises(SeriesError):
        phase_exponents(4, 0.5, 'textbook')


def test_first_moment_matches_matrix():
    label = CoherentLabel(0.7, 1.3, 0.4, -0.5)
    q = 0.6
    E = normalization_Eq(0.7, 0.4, q)
    closed = math.sqrt(0.7) / E * F_q(0.7, 0.4, -1.3, 1, q)
    state = build_coherent_vector(label, q, tol=1e-14)
    oracle = MatrixOracle(state, derive_params(PhysicalInputs(q=q)))
    assert abs(closed - oracle.moment('A1')) < 1e-10


def test_joint_moment_matches_matrix():
    label = CoherentLabel(0.7, 1.3, 0.4, -0.5)
    q = 0.6
    E = normalization_Eq(0.7, 0.4, q)
    closed = math.sqrt(0.7 * 0.4) / E * F_q_joint(0.7, 0.4, -1.3, 0.5, q)
    state = build_coherent_vector(label, q, tol=1e-14)
    oracle = MatrixOracle(state, derive_params(PhysicalInputs(q=q)))
    assert abs(closed - oracle.moment('A1', 'A2')) < 1e-10


def test_bundle_at_zero_phase():
    J1, J2 = 0.3, 0.45
    gb = g_bundle(CoherentLabel(J1, 0.0, J2, 0.0), 0.7)
    assert gb.Gc1 == pytest.approx(2 * math.sqrt(J1), abs=1e-14)
    assert gb.Gc2 == pytest.approx(2 * math.sqrt(J2), abs=1e-14)
    assert gb.Gq1 == pytest.approx(2 * J1, abs=1e-14)
    assert gb.Gc_plus == pytest.approx(2 * math.sqrt(J1 * J2), abs=1e-14)
    assert gb.Gc_minus == pytest.approx(2 * math.sqrt(J1 * J2), abs=1e-14)
    for name in ('Gs1', 'Gs2', 'Gs_plus', 'Gs_minus'):
        assert getattr(gb, name) == 0


def test_bundle_with_empty_mode():
    gb = g_bundle(CoherentLabel(0.0, 1.0, 0.4, 0.3), 0.7)
    assert gb.Gc1 == gb.Gq1 == gb.Gc_plus == gb.Gc_minus == 0.0
    assert gb.Gs1 == 0 and gb.Gs_plus == 0
    assert gb.Gc2 != 0.0


def test_bundle_matches_matrix():
    q = 0.7
    label = CoherentLabel(0.5, math.pi / 3, 0.5, -math.pi / 4)
    gb = g_bundle(label, q)
    state = build_coherent_vector(label, q, tol=1e-14)
    o = MatrixOracle(state, derive_params(PhysicalInputs(q=q)))
    matrix = {
        'Gc1': o.moment('A1') + o.moment('A1d'),
        'Gs1': o.moment('A1d') - o.moment('A1'),
        'Gq1': o.moment('A1', 'A1') + o.moment('A1d', 'A1d'),
        'Gq2': o.moment('A2', 'A2') + o.moment('A2d', 'A2d'),
        'Gc_plus': o.moment('A1', 'A2') + o.moment('A1d', 'A2d'),
        'Gc_minus': o.moment('A1d', 'A2') + o.moment('A2d', 'A1'),
        'Gs_plus': o.moment('A1d', 'A2d') - o.moment('A1', 'A2'),
        'Gs_minus': o.moment('A1d', 'A2') - o.moment('A2d', 'A1'),
    }
    for name, value in matrix.items():
        assert abs(getattr(gb, name) - value) < 1e-10, name


@given(J1=actions, J2=actions, g1=phases, g2=phases, q=qs)
def test_bundle_ranges(J1, J2, g1, g2, q):
    gb = g_bundle(CoherentLabel(J1, g1, J2, g2), q)
    assert abs(gb.Gc1) <= 2 * math.sqrt(J1) * (1 + 1e-12) + 1e-12
    assert abs(gb.Gq2) <= 2 * J2 * (1 + 1e-12) + 1e-12
    assert abs(gb.Gs_minus.imag) <= 2 * math.sqrt(J1 * J2) * (1 + 1e-12) + 1e-12
    for name in ('Gs1', 'Gs2', 'Gs_plus', 'Gs_minus'):
        assert getattr(gb, name).real == 0.0


def test_range_check():
    with raises(BundleRangeError):
        GBundle(3.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, J1=1.0, J2=0.0).check_ranges()
    with raises(BundleRangeError):
        GBundle(0, 0, 0.5, 0, 0, 0, 0, 0, 0, 0, J1=1.0, J2=0.0).check_ranges()


def test_bundle_stable_under_cutoff_doubling():
    label = CoherentLabel(0.45, 0.8, 0.35, -2.2)
    q, tol = 0.6, 1e-12
    N = pick_cutoff(label.J1, label.J2, q, tol)
    a = g_bundle(label, q, tol=tol, cutoff=N).to_dict()
    b = g_bundle(label, q, tol=tol, cutoff=2 * N).to_dict()
    for name in GBundle.fields:
        assert abs(a[name] - b[name]) <= 10 * tol


def test_bundle_rejects_short_cutoff():
    label = CoherentLabel(1.2, 0.4, 1.2, -0.3)
    with raises(CutoffError):
        g_bundle(label, 0.5, cutoff=3)
    with raises(CutoffError):
        F_q_joint(1.2, 1.2, 0.4, -0.3, 0.5, cutoff=3)
    N = pick_cutoff(1.2, 1.2, 0.5, 1e-15)
    with raises(CutoffError):
        g_bundle(label, 0.5, cutoff=N - 1)
    fixed = g_bundle(label, 0.5, cutoff=N)
    assert fixed.to_dict() == g_bundle(label, 0.5).to_dict()


def test_literal_convention_differs():
    label = CoherentLabel(0.5, 2.0, 0.3, 0.0)
    a = g_bundle(label, 0.5)
    b = g_bundle(label, 0.5, convention='paper-literal')
    assert abs(a.Gc1 - b.Gc1) > 1e-4
    same = g_bundle(label, 1.0, convention='paper-literal')
    assert abs(same.Gc1 - g_bundle(label, 1.0).Gc1) < 1e-15
    with raises(SeriesError):
        g_bundle(label, 0.5, convention='textbook')
    with raises(DomainError):
        g_bundle(CoherentLabel(1.5), 0.5)


def test_ladder_moments():
    label = CoherentLabel(0.6, 0.9, 0.25, -1.4)
    q = 0.8
    m = ladder_moments(label, q)
    assert len(m) == 20
    assert m['A1d A1'] == 0.6
    assert m['A2 A2d'] == pytest.approx(1 + q * q * 0.25)
    assert m['A1d'] == m['A1'].conjugate()
    assert m['A1 A2'] == m['A1'] * m['A2']
    assert m['A2d A1'] == m['A2d'] * m['A1']
    assert set(LADDER_NAMES) < set(m)
