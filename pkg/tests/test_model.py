import math

import pytest
from hypothesis import given, strategies as st
from pytest import raises

from bicoherent.model import (CanonicalCoefficients, ModelError,
                              PhysicalInputs, derive_params)
from bicoherent.qmath import DomainError


positive = st.floats(min_value=0.1, max_value=10.0)
thetas = st.floats(min_value=0.0, max_value=10.0)


def test_defaults():
    p = derive_params(PhysicalInputs())
    assert (p.lambda1, p.lambda2, p.K1, p.K2) == (1.0, 1.0, 4.0, 4.0)
    assert p.Lambda == 2.0
    assert p.unit_regime


def test_golden_ratio():
    p = derive_params(PhysicalInputs(theta=1.0))
    golden = (1 + math.sqrt(5)) / 2
    assert p.lambda1 == pytest.approx(golden, rel=1e-15)
    assert p.lambda2 == pytest.approx(golden - 1, rel=1e-15)


@given(m=positive, omega=positive, hbar=positive, theta=thetas)
def test_derived_invariants(m, omega, hbar, theta):
    p = derive_params(PhysicalInputs(m, omega, hbar, theta))
    mw = m * omega
    assert p.lambda1 >= p.lambda2 > 0
    assert p.K1 > 0 and p.K2 > 0
    assert p.lambda_product == pytest.approx((hbar * mw) ** 2, rel=1e-12)
    diff = p.lambda1 - p.lambda2
    scale = max(p.lambda1, mw * mw * theta)
    assert abs(diff - mw * mw * theta) <= 1e-12 * scale


def test_K2_positive_for_large_theta():
    p = derive_params(PhysicalInputs(theta=1e6))
    assert p.K2 > 0
    assert p.lambda2 > 0


@pytest.mark.parametrize('m, omega, hbar', [(1.0, 1.0, 1.0), (2.0, 0.5, 1.3)])
def test_continuous_at_zero_theta(m, omega, hbar):
    flat = derive_params(PhysicalInputs(m=m, omega=omega, hbar=hbar))
    near = derive_params(PhysicalInputs(m=m, omega=omega, hbar=hbar,
                                        theta=1e-10))
    for name in ('lambda1', 'lambda2', 'K1', 'K2', 'Lambda'):
        a, b = getattr(flat, name), getattr(near, name)
        assert abs(a - b) < 1e-8 * abs(a), name


@pytest.mark.parametrize('kw', [{'m': 0}, {'omega': -1.0}, {'hbar': 0.0},
                                {'theta': -0.1}, {'m': float('inf')},
                                {'theta': float('nan')}])
def test_invalid_inputs(kw):
    with raises(ModelError):
        PhysicalInputs(**kw)


def test_invalid_q():
    with raises(DomainError):
        PhysicalInputs(q=0.0)
    with raises(DomainError):
        PhysicalInputs(q=1.5)


def test_derive_from_mapping():
    p = derive_params({'theta': 0.5, 'q': 0.7})
    assert p.theta == 0.5
    assert p.q == 0.7


def test_coefficients():
    p = derive_params(PhysicalInputs(hbar=2.0, theta=0.3))
    cc = p.coefficients
    assert isinstance(cc, CanonicalCoefficients)
    c = 1 / (2 * p.Lambda)
    assert cc['X1'].kind == 'sum' and cc['X2'].kind == 'diff'
    assert cc.X1.mode1 == pytest.approx(-2.0 * math.sqrt(p.K1) * c)
    assert cc.P2.mode2 == pytest.approx(p.lambda1 * math.sqrt(p.K2) * c)
    assert [name for name, _ in cc.items()] == ['X1', 'X2', 'P1', 'P2']
    with raises(KeyError):
        cc['A1']


def test_with_q():
    p = derive_params(PhysicalInputs(theta=0.4))
    pq = p.with_q(0.5)
    assert pq.q == 0.5
    assert (pq.lambda1, pq.K2) == (p.lambda1, p.K2)
    assert p.q == 1.0


def test_unit_regime():
    assert derive_params(PhysicalInputs(m=2.0)).unit_regime
    assert not derive_params(PhysicalInputs(hbar=0.5)).unit_regime


def test_to_dict():
    inputs = PhysicalInputs(theta=0.2, q=0.9)
    assert inputs.replace(theta=0.2) == inputs
    d = derive_params(inputs).to_dict()
    assert d['q'] == 0.9
    assert set(d) >= {'lambda1', 'lambda2', 'K1', 'K2', 'Lambda'}
