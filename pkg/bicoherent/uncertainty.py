# Copyright (c) 2024, The bicoherent contributors
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions are
# met:
#
#    * Redistributions of source code must retain the above copyright
#      notice, this list of conditions and the following disclaimer.
#
#    * Redistributions in binary form must reproduce the above
#      copyright notice, this list of conditions and the following
#      disclaimer in the documentation and/or other materials provided
#      with the distribution.
#
#    * The names of the contributors may not be used to endorse or
#      promote products derived from this software without specific
#      prior written permission.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR
# A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT
# OWNER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL,
# SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT
# LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE,
# DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY
# THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT
# (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE
# OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
"""Variances and uncertainty relations of the position and momentum
operators in the coherent states.

Every quantity here is a closed form in the G functions of
:mod:`bicoherent.series`. For a pair of observables ``(O1, O2)`` the
generalized uncertainty relation reads

    dO1 dO2 >= |<[O1, O2]>| / 2

and :func:`gur_report` evaluates both sides for the six pairs of
:data:`PAIRS`. At zero phases and zero noncommutativity the
position-momentum relations are saturated:

>>> from bicoherent.model import derive_params, PhysicalInputs
>>> from bicoherent.states import CoherentLabel
>>> params = derive_params(PhysicalInputs(q=0.5))
>>> reports = gur_report(CoherentLabel(0.5, 0.0, 0.5, 0.0), params)
>>> [r.pair for r in reports if r.saturated]
['X1P1', 'X2P2']

Variances that come out negative by rounding alone (down to ``-1e-10``)
are clamped to zero with a :class:`RuntimeWarning`; anything more
negative raises :exc:`VarianceError`.
"""

import logging
import math
import warnings

import numpy as np
from boltons.mathutils import clamp
from boltons.namedutils import namedtuple

from .qmath import QValue
from .series import DEFAULT_CONVENTION, DEFAULT_SERIES_TOL, g_bundle
from .states import CoherentLabel


__all__ = ['VarianceError', 'PAIRS', 'NONTRIVIAL_PAIRS', 'VARIANCE_OF',
           'DEFAULT_TOL', 'SATURATION_TOL', 'VarianceSet', 'CommutatorBounds',
           'FirstMoments', 'GurReport', 'Feasibility', 'ViolationWitness',
           'ScanResult', 'make_report', 'reports_from_moments',
           'variances_closed_form', 'first_moments', 'commutator_means',
           'commutator_rhs', 'gur_report', 'feasibility_conditions',
           'zero_phase_products', 'saturation_excess', 'scan_violations']


PAIRS = ('X1X2', 'X1P1', 'X2P2', 'P1P2', 'X1P2', 'X2P1')
NONTRIVIAL_PAIRS = PAIRS[:4]
DEFAULT_TOL = 1e-9
SATURATION_TOL = 1e-6
NEGATIVE_VARIANCE_TOL = 1e-10

# which variance belongs to which observable
VARIANCE_OF = {'X1': 'chi1', 'X2': 'chi2', 'P1': 'kappa1', 'P2': 'kappa2'}

log = logging.getLogger(__name__)


class VarianceError(ValueError):
    pass


VarianceSet = namedtuple('VarianceSet', 'chi1 chi2 kappa1 kappa2')
CommutatorBounds = namedtuple('CommutatorBounds', 'X1X2 X1P1 X2P2 P1P2')
FirstMoments = namedtuple('FirstMoments', 'X1 X2 P1 P2')
GurReport = namedtuple('GurReport', 'pair lhs rhs ratio satisfied saturated')
ViolationWitness = namedtuple('ViolationWitness', 'gamma1 gamma2 pair ratio')
ScanResult = namedtuple('ScanResult',
                        'min_ratio argmin witnesses points invalid')


class Feasibility(namedtuple('Feasibility', 'p1 p2 p3 p4 reduced1 reduced2'
                                            ' reduced_cross')):
    """Signed values of the four feasibility conditions and of the three
    reduced conditions. Each is expected to be non-negative; nothing
    here assumes it."""
    __slots__ = ()

    def holds(self, tol=DEFAULT_TOL):
        return {name: val >= -tol for name, val in zip(self._fields, self)}


def _check_variance(name, value):
    if value >= 0:
        return value
    if value < -NEGATIVE_VARIANCE_TOL:
        raise VarianceError('%s=%r is negative' % (name, value))
    warnings.warn('clamping rounding-level negative variance %s=%r to zero'
                  % (name, value), RuntimeWarning, stacklevel=3)
    return clamp(value, lower=0.0)


def _label_q(label, params, q):
    if not isinstance(label, CoherentLabel):
        label = CoherentLabel(*label)
    q = params.q if q is None else QValue(q)
    return label, q


def _a_values(label, q):
    dq = 1.0 - float(q) ** 2
    return 1.0 - dq * label.J1, 1.0 - dq * label.J2


def variances_closed_form(label, params, q=None, gb=None,
                          convention=DEFAULT_CONVENTION,
                          tol=DEFAULT_SERIES_TOL, strict=True):
    """The variances ``chi_i`` of ``X_i`` and ``kappa_i`` of ``P_i``.

    With ``L = lambda1 + lambda2``,

    * ``chi1 = hbar^2 K1/(4 L^2) (1 + (1+q^2) J1 + Gq1 - Gc1^2) + (same for mode 2)
      + hbar^2 sqrt(K1 K2)/(2 L^2) (-Gc+ - Gc- + Gc1 Gc2)``
    * ``chi2 = hbar^2 K1/(4 L^2) (1 + (1+q^2) J1 - Gq1 + Gs1^2) + (same for mode 2)
      + hbar^2 sqrt(K1 K2)/(2 L^2) (-Gc+ + Gc- + Gs1 Gs2)``

    and ``kappa1``, ``kappa2`` follow from ``chi2``, ``chi1`` by
    weighting mode 1 with ``lambda2`` and mode 2 with ``lambda1`` (and
    flipping the sign of the mixed term for ``kappa1``). ``Gs**2`` is the
    real square of a purely imaginary number, so it is never positive.

    *gb* may be passed in to reuse a :class:`~bicoherent.series.GBundle`
    of the same label, ``q`` and convention. With *strict* off the raw
    values are returned unchecked; G values of the ``'paper-literal'``
    convention do not always belong to a state and can give negative
    variances.

    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> v = variances_closed_form(CoherentLabel(), derive_params(PhysicalInputs()))
    >>> v.chi1, v.kappa2
    (0.5, 0.5)
    """
    label, q = _label_q(label, params, q)
    if gb is None:
        gb = g_bundle(label, q, convention, tol)
    q2 = float(q) ** 2
    K1, K2, l1, l2 = params.K1, params.K2, params.lambda1, params.lambda2
    hbar, L2 = params.hbar, params.Lambda ** 2
    r12 = math.sqrt(K1 * K2)
    gs1, gs2 = gb.Gs1.imag, gb.Gs2.imag
    # variances of A_i + A_i^ and i(A_i - A_i^), and their covariances
    vb1 = 1 + (1 + q2) * label.J1 + gb.Gq1 - gb.Gc1 ** 2
    vb2 = 1 + (1 + q2) * label.J2 + gb.Gq2 - gb.Gc2 ** 2
    vd1 = 1 + (1 + q2) * label.J1 - gb.Gq1 - gs1 ** 2
    vd2 = 1 + (1 + q2) * label.J2 - gb.Gq2 - gs2 ** 2
    cb = gb.Gc_plus + gb.Gc_minus - gb.Gc1 * gb.Gc2
    cd = -gb.Gc_plus + gb.Gc_minus - gs1 * gs2
    chi1 = hbar ** 2 / (4 * L2) * (K1 * vb1 + K2 * vb2 - 2 * r12 * cb)
    chi2 = hbar ** 2 / (4 * L2) * (K1 * vd1 + K2 * vd2 + 2 * r12 * cd)
    kappa1 = (l2 ** 2 * K1 * vd1 + l1 ** 2 * K2 * vd2
              - 2 * l1 * l2 * r12 * cd) / (4 * L2)
    kappa2 = (l2 ** 2 * K1 * vb1 + l1 ** 2 * K2 * vb2
              + 2 * l1 * l2 * r12 * cb) / (4 * L2)
    if not strict:
        return VarianceSet(chi1, chi2, kappa1, kappa2)
    vals = {'chi1': chi1, 'chi2': chi2, 'kappa1': kappa1, 'kappa2': kappa2}
    return VarianceSet(**{k: _check_variance(k, v) for k, v in vals.items()})


def first_moments(label, params, q=None, gb=None,
                  convention=DEFAULT_CONVENTION, tol=DEFAULT_SERIES_TOL):
    """Closed-form means of ``X1, X2, P1, P2``. They are real; the ``X2``
    and ``P1`` means come from ``i Gs``, which is real because ``Gs`` is
    purely imaginary."""
    label, q = _label_q(label, params, q)
    if gb is None:
        gb = g_bundle(label, q, convention, tol)
    hbar, l1, l2 = params.hbar, params.lambda1, params.lambda2
    r1, r2 = math.sqrt(params.K1), math.sqrt(params.K2)
    c = 1.0 / (2 * params.Lambda)
    gs1, gs2 = gb.Gs1.imag, gb.Gs2.imag
    # i * Gs = -Im(Gs) for a purely imaginary Gs
    return FirstMoments(X1=c * hbar * (-r1 * gb.Gc1 + r2 * gb.Gc2),
                        X2=c * hbar * (r1 * gs1 + r2 * gs2),
                        P1=c * (l2 * r1 * gs1 - l1 * r2 * gs2),
                        P2=c * (l2 * r1 * gb.Gc1 + l1 * r2 * gb.Gc2))


def commutator_means(label, params, q=None):
    """Expectations of the four non-vanishing commutators, each ``i``
    times a real number. With ``a_i = 1 - (1 - q^2) J_i``:

    * ``<[X1, X2]> = i hbar^2/(2 L^2) (K1 a1 - K2 a2)``
    * ``<[X1, P1]> = <[X2, P2]> = i hbar/(2 L^2) (lambda2 K1 a1 + lambda1 K2 a2)``
    * ``<[P1, P2]> = i/(2 L^2) (lambda2^2 K1 a1 - lambda1^2 K2 a2)``

    None of them depends on the phases.
    """
    label, q = _label_q(label, params, q)
    a1, a2 = _a_values(label, q)
    K1, K2, l1, l2 = params.K1, params.K2, params.lambda1, params.lambda2
    hbar, c = params.hbar, 1.0 / (2 * params.Lambda ** 2)
    xp = 1j * hbar * c * (l2 * K1 * a1 + l1 * K2 * a2)
    return CommutatorBounds(X1X2=1j * hbar ** 2 * c * (K1 * a1 - K2 * a2),
                            X1P1=xp, X2P2=xp,
                            P1P2=1j * c * (l2 ** 2 * K1 * a1 - l1 ** 2 * K2 * a2))


def commutator_rhs(label, params, q=None):
    """Right-hand sides ``|<[O1, O2]>| / 2`` of the uncertainty relations
    for the four non-commuting pairs.

    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> commutator_rhs(CoherentLabel(0.3, 0.0, 0.3, 0.0), derive_params(PhysicalInputs()))
    CommutatorBounds(X1X2=0.0, X1P1=0.5, X2P2=0.5, P1P2=0.0)
    """
    means = commutator_means(label, params, q)
    return CommutatorBounds(*[abs(m.imag) / 2 for m in means])


def make_report(pair, lhs, rhs, tol=DEFAULT_TOL, saturation_tol=SATURATION_TOL):
    """Build a :class:`GurReport` from the two sides of one relation.

    >>> make_report('X1P2', 0.3, 0.0).ratio
    inf
    >>> make_report('X1X2', 0.0, 0.0).ratio
    1.0
    """
    lhs, rhs = float(lhs), float(rhs)
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = float('inf') if lhs > 0 else 1.0
    satisfied = lhs + tol * max(1.0, rhs) >= rhs
    saturated = abs(lhs - rhs) <= saturation_tol * rhs
    return GurReport(pair, lhs, rhs, ratio, satisfied, saturated)


def reports_from_moments(variances, rhs, tol=DEFAULT_TOL,
                         saturation_tol=SATURATION_TOL):
    """Assemble the six :class:`GurReport` entries from a
    :class:`VarianceSet` and a :class:`CommutatorBounds`. The two
    commuting cross pairs get ``rhs = 0``."""
    ret = []
    for pair in PAIRS:
        v1 = getattr(variances, VARIANCE_OF[pair[:2]])
        v2 = getattr(variances, VARIANCE_OF[pair[2:]])
        bound = getattr(rhs, pair) if pair in NONTRIVIAL_PAIRS else 0.0
        ret.append(make_report(pair, math.sqrt(v1 * v2), bound,
                               tol, saturation_tol))
    return ret


def gur_report(label, params, q=None, tol=DEFAULT_TOL,
               convention=DEFAULT_CONVENTION, series_tol=DEFAULT_SERIES_TOL,
               saturation_tol=SATURATION_TOL, gb=None):
    """Evaluate the uncertainty relation for the six pairs of
    :data:`PAIRS`, in that order. The left-hand side of ``(O1, O2)``
    is the square root of the product of the two variances.

    ``satisfied`` means ``lhs + tol * max(1, rhs) >= rhs``; ``saturated``
    means ``|lhs - rhs| <= saturation_tol * rhs``. ``ratio`` is
    ``lhs / rhs``, infinite when only ``rhs`` vanishes and ``1.0`` when
    both do.
    """
    label, q = _label_q(label, params, q)
    variances = variances_closed_form(label, params, q, gb, convention,
                                      series_tol)
    return reports_from_moments(variances, commutator_rhs(label, params, q),
                                tol, saturation_tol)


def feasibility_conditions(label, params, q=None, gb=None,
                           convention=DEFAULT_CONVENTION,
                           tol=DEFAULT_SERIES_TOL):
    """The four feasibility conditions and their reduced forms.

    Each ``p_k`` is a variance scaled by ``4 L^2`` (and ``1/hbar^2`` for
    positions) minus its value at zero phases, in the order ``chi1,
    chi2, kappa1, kappa2``:

    * ``p1 = K1 (2 J1 + Gq1 - Gc1^2) + K2 (2 J2 + Gq2 - Gc2^2) - 2 sqrt(K1 K2) (Gc+ + Gc- - Gc1 Gc2)``
    * ``p2 = K1 (2 J1 - Gq1 + Gs1^2) + K2 (2 J2 - Gq2 + Gs2^2) + 2 sqrt(K1 K2) (-Gc+ + Gc- + Gs1 Gs2)``
    * ``p3`` and ``p4`` are ``p2`` and ``p1`` with mode 1 weighted by
      ``lambda2^2``, mode 2 by ``lambda1^2`` and the mixed term by
      ``lambda1 lambda2`` (sign flipped for ``p3``).

    Non-negative ``p_k`` mean every variance is at least its zero-phase
    value, at which the position-momentum relations hold. The reduced
    conditions are ``4 J_i - Gc_i^2 + Gs_i^2`` and
    ``2 Gc+ - (Gc1 Gc2 + Gs1 Gs2)``.

    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> feas = feasibility_conditions(CoherentLabel(), derive_params(PhysicalInputs()))
    >>> tuple(feas)
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    """
    label, q = _label_q(label, params, q)
    if gb is None:
        gb = g_bundle(label, q, convention, tol)
    K1, K2, l1, l2 = params.K1, params.K2, params.lambda1, params.lambda2
    r12 = math.sqrt(K1 * K2)
    J1, J2 = label.J1, label.J2
    # Gs**2 and Gs1 Gs2 are real for purely imaginary Gs
    gs1sq, gs2sq = (gb.Gs1 ** 2).real, (gb.Gs2 ** 2).real
    gs12 = (gb.Gs1 * gb.Gs2).real
    b1 = 2 * J1 + gb.Gq1 - gb.Gc1 ** 2
    b2 = 2 * J2 + gb.Gq2 - gb.Gc2 ** 2
    d1 = 2 * J1 - gb.Gq1 + gs1sq
    d2 = 2 * J2 - gb.Gq2 + gs2sq
    cb = gb.Gc_plus + gb.Gc_minus - gb.Gc1 * gb.Gc2
    cd = -gb.Gc_plus + gb.Gc_minus + gs12
    return Feasibility(
        p1=K1 * b1 + K2 * b2 - 2 * r12 * cb,
        p2=K1 * d1 + K2 * d2 + 2 * r12 * cd,
        p3=l2 ** 2 * K1 * d1 + l1 ** 2 * K2 * d2 - 2 * l1 * l2 * r12 * cd,
        p4=l2 ** 2 * K1 * b1 + l1 ** 2 * K2 * b2 + 2 * l1 * l2 * r12 * cb,
        reduced1=4 * J1 - gb.Gc1 ** 2 + gs1sq,
        reduced2=4 * J2 - gb.Gc2 ** 2 + gs2sq,
        reduced_cross=2 * gb.Gc_plus - (gb.Gc1 * gb.Gc2 + gs12))


def _zero_phase_variances(label, params, q):
    a1, a2 = _a_values(label, q)
    K1, K2, l1, l2 = params.K1, params.K2, params.lambda1, params.lambda2
    L2 = params.Lambda ** 2
    chi = params.hbar ** 2 * (K1 * a1 + K2 * a2) / (4 * L2)
    kappa = (l2 ** 2 * K1 * a1 + l1 ** 2 * K2 * a2) / (4 * L2)
    return VarianceSet(chi, chi, kappa, kappa)


def zero_phase_products(label, params, q=None):
    """Products of variances ``dO1^2 dO2^2`` for every pair when both
    phases vanish. Then ``chi1 = chi2 = hbar^2 (K1 a1 + K2 a2) / (4 L^2)``
    and ``kappa1 = kappa2 = (lambda2^2 K1 a1 + lambda1^2 K2 a2) / (4 L^2)``,
    whatever the phases of *label* are.

    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> zero_phase_products(CoherentLabel(), derive_params(PhysicalInputs()))['X1P1']
    0.25
    """
    label, q = _label_q(label, params, q)
    v = _zero_phase_variances(label, params, q)
    return {pair: getattr(v, VARIANCE_OF[pair[:2]])
            * getattr(v, VARIANCE_OF[pair[2:]]) for pair in PAIRS}


def saturation_excess(label, params, q=None):
    """How far ``chi1 kappa1`` exceeds the squared bound of ``X1P1`` at
    zero phases: ``(hbar (lambda1 - lambda2) / (4 L^2))^2 K1 K2 a1 a2``.
    It vanishes at ``theta == 0``.
    """
    label, q = _label_q(label, params, q)
    a1, a2 = _a_values(label, q)
    pre = params.hbar * (params.lambda1 - params.lambda2) / (4 * params.Lambda ** 2)
    return pre ** 2 * params.K1 * params.K2 * a1 * a2


def scan_violations(J1, J2, params, q=None, gamma1_grid=None,
                    gamma2_grid=None, resolution=64,
                    convention=DEFAULT_CONVENTION, tol=DEFAULT_TOL,
                    saturation_tol=SATURATION_TOL,
                    series_tol=DEFAULT_SERIES_TOL):
    """Scan a rectangular phase grid at fixed actions and collect every
    point where some pair has ``ratio < 1 - saturation_tol``.

    Without explicit grids both phases run over *resolution* evenly
    spaced points of ``[-pi, pi]``. The scan is deterministic; the
    result carries the smallest ratio found, the ``(gamma1, gamma2,
    pair)`` where it occurs, the witnesses, the number of points and
    the number of points whose variances came out negative (only
    possible for the ``'paper-literal'`` convention).
    """
    q = params.q if q is None else QValue(q)
    if gamma1_grid is None:
        gamma1_grid = np.linspace(-math.pi, math.pi, int(resolution)).tolist()
    if gamma2_grid is None:
        gamma2_grid = np.linspace(-math.pi, math.pi, int(resolution)).tolist()
    rhs = commutator_rhs(CoherentLabel(J1, 0.0, J2, 0.0), params, q)
    min_ratio, argmin, witnesses, points, invalid = float('inf'), None, [], 0, 0
    for g1 in gamma1_grid:
        for g2 in gamma2_grid:
            points += 1
            label = CoherentLabel(J1, g1, J2, g2)
            try:
                variances = variances_closed_form(label, params, q, None,
                                                  convention, series_tol)
            except VarianceError:
                invalid += 1
                continue
            for report in reports_from_moments(variances, rhs, tol,
                                               saturation_tol):
                if report.ratio < min_ratio:
                    min_ratio = report.ratio
                    argmin = (float(g1), float(g2), report.pair)
                if report.ratio < 1 - saturation_tol:
                    witnesses.append(ViolationWitness(float(g1), float(g2),
                                                      report.pair,
                                                      report.ratio))
    if invalid:
        log.warning('%d of %d scan points had negative variances', invalid,
                    points)
    return ScanResult(min_ratio, argmin, witnesses, points, invalid)
