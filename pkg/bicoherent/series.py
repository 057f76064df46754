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
"""Closed-form series behind the moments of the coherent states.

Every expectation value of a polynomial in the ladder operators is a
ratio of phase-weighted q-exponential series. The central one is

    F_q(J1, J2, gamma1, gamma2) = sum J1**n1 J2**n2 exp(i (gamma1 phi(n1) + gamma2 phi(n2)))
                                  / ([n1]_q! [n2]_q!)

where the phase exponent ``phi`` depends on the *convention*:

* ``'spectral-gap'`` (the default) uses ``phi(n) = q**(2n)``, the gap
  ``[n+1]_q - [n]_q`` that a lowering operator picks up between
  neighbouring amplitudes. Only this convention reproduces the matrix
  expectations.
* ``'paper-literal'`` uses ``phi(n) = q**(2 [n]_q)``, kept for
  comparison.

At ``q == 1`` both reduce to ``phi(n) = 1`` and
``F = exp(i (gamma1 + gamma2)) E``:

>>> f = F_q_joint(1.0, 2.0, 0.3, 0.0, 1.0)
>>> abs(f - cmath.exp(0.3j) * math.exp(3.0)) < 1e-12
True

The double series factorizes into two single-mode series, which is how
they are evaluated by default; each single-mode sum is accumulated with
:func:`math.fsum`. ``method='direct'`` sums the full two-dimensional
grid instead and serves as a cross-check.

:func:`g_bundle` packs the ten G functions built from these series,
and :func:`ladder_moments` gives the closed forms of the first moments
and of all sixteen ordered ladder bilinears.
"""

import cmath
import math

import numpy as np
from boltons.cacheutils import LRU, cached

from .qmath import QValue, pick_cutoff, q_ints, series_terms, tail_bound
from .states import CoherentLabel, CutoffError


__all__ = ['SeriesError', 'BundleRangeError', 'CONVENTIONS',
           'DEFAULT_CONVENTION', 'phase_exponents', 'mode_sum', 'F_q',
           'F_q_joint', 'GBundle', 'g_bundle', 'LADDER_NAMES',
           'ladder_moments']


CONVENTIONS = ('spectral-gap', 'paper-literal')
DEFAULT_CONVENTION = 'spectral-gap'
DEFAULT_SERIES_TOL = 1e-15
RANGE_TOL = 1e-12
LADDER_NAMES = ('A1', 'A1d', 'A2', 'A2d')


class SeriesError(ValueError):
    pass


class BundleRangeError(SeriesError):
    pass


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise SeriesError('expected convention in %r, not %r'
                          % (CONVENTIONS, convention))
    return convention


def phase_exponents(size, q, convention=DEFAULT_CONVENTION):
    """The exponents ``phi(n)`` for ``n`` in ``0 .. size - 1``.

    >>> [round(x, 12) for x in phase_exponents(3, 0.5).tolist()]
    [1.0, 0.25, 0.0625]
    >>> [round(x, 12) for x in phase_exponents(3, 0.5, 'paper-literal').tolist()]
    [1.0, 0.25, 0.176776695297]
    """
    q = QValue(q)
    _check_convention(convention)
    if q.is_undeformed:
        return np.ones(int(size))
    lq2 = 2.0 * math.log(q)
    if convention == 'spectral-gap':
        return np.exp(lq2 * np.arange(int(size), dtype=float))
    return np.exp(lq2 * np.asarray(q_ints(size, q)))


@cached(LRU(max_size=1024))
def _mode_table(J, q, size, convention):
    terms = series_terms(J, q, size)
    phases = phase_exponents(size, q, convention)
    terms.flags.writeable = phases.flags.writeable = False
    return terms, phases


def mode_sum(J, gamma, q, size, convention=DEFAULT_CONVENTION):
    """Single-mode series ``sum_{n < size} J**n exp(i gamma phi(n)) / [n]_q!``,
    real and imaginary parts accumulated separately with :func:`math.fsum`.

    >>> mode_sum(0.0, 1.0, 0.5, 8)
    (1+0j)
    """
    terms, phases = _mode_table(float(J), QValue(q), int(size), convention)
    if gamma == 0:
        return complex(math.fsum(terms), 0.0)
    angles = float(gamma) * phases
    return complex(math.fsum(terms * np.cos(angles)),
                   math.fsum(terms * np.sin(angles)))


def _direct_sum(J1, J2, gamma1, gamma2, q, size, convention):
    t1, p1 = _mode_table(J1, q, size, convention)
    t2, p2 = _mode_table(J2, q, size, convention)
    weights = np.outer(t1, t2)
    angles = gamma1 * p1[:, None] + gamma2 * p2[None, :]
    n1, n2 = np.indices((size, size))
    # increasing total order n1 + n2
    order = np.argsort((n1 + n2).ravel(), kind='stable')
    re = (weights * np.cos(angles)).ravel()[order]
    im = (weights * np.sin(angles)).ravel()[order]
    return complex(math.fsum(re), math.fsum(im))


def _series_cutoff(J1, J2, q, tol, cutoff):
    if cutoff is None:
        return pick_cutoff(J1, J2, q, tol)
    cutoff = int(cutoff)
    bound = tail_bound(J1, J2, q, cutoff)
    if bound > tol:
        raise CutoffError('cutoff %d leaves a series tail of up to %.3e'
                          ' for J=(%r, %r), q=%r (tol %.3e)'
                          % (cutoff, bound, J1, J2, float(q), tol))
    return cutoff


def F_q_joint(J1, J2, gamma1, gamma2, q, convention=DEFAULT_CONVENTION,
              tol=DEFAULT_SERIES_TOL, cutoff=None, method='product'):
    """The double series ``F_q(J1, J2, gamma1, gamma2)``.

    The cutoff is the smallest one whose
    :func:`~bicoherent.qmath.tail_bound` is at most *tol*, unless
    *cutoff* fixes it; a fixed cutoff whose tail bound exceeds *tol*
    raises :exc:`~bicoherent.states.CutoffError`. Conjugating both
    phases conjugates the result:

    >>> a = F_q_joint(0.7, 0.4, 1.3, -0.2, 0.6)
    >>> abs(F_q_joint(0.7, 0.4, -1.3, 0.2, 0.6) - a.conjugate()) < 1e-14
    True
    """
    q = QValue(q)
    _check_convention(convention)
    J1, J2 = float(J1), float(J2)
    gamma1, gamma2 = float(gamma1), float(gamma2)
    cutoff = _series_cutoff(J1, J2, q, tol, cutoff)
    if method == 'product':
        return (mode_sum(J1, gamma1, q, cutoff, convention)
                * mode_sum(J2, gamma2, q, cutoff, convention))
    elif method == 'direct':
        return _direct_sum(J1, J2, gamma1, gamma2, q, cutoff, convention)
    raise SeriesError('unknown summation method: %r' % (method,))


def F_q(J1, J2, gamma, mode, q, convention=DEFAULT_CONVENTION,
        tol=DEFAULT_SERIES_TOL, cutoff=None, method='product'):
    """``F_q`` with the phase on one mode only: ``F_q(J1, J2, gamma)``
    carries ``exp(i gamma phi(n1))`` for *mode* ``1`` and
    ``exp(i gamma phi(n2))`` for *mode* ``2``.

    >>> F_q(0.7, 0.4, 0.0, 1, 0.6) == F_q_joint(0.7, 0.4, 0.0, 0.0, 0.6)
    True
    """
    if mode == 1:
        return F_q_joint(J1, J2, gamma, 0.0, q, convention, tol, cutoff, method)
    elif mode == 2:
        return F_q_joint(J1, J2, 0.0, gamma, q, convention, tol, cutoff, method)
    raise SeriesError('expected mode 1 or 2, not %r' % (mode,))


class GBundle:
    """The ten G functions of one label, all normalized by ``E_q``:

    * ``Gc1, Gc2``: ``<A_i + A_i^dagger>``, real
    * ``Gs1, Gs2``: ``<A_i^dagger - A_i>``, purely imaginary
    * ``Gq1, Gq2``: ``<A_i A_i + A_i^dagger A_i^dagger>``, real
    * ``Gc_plus``: ``<A1 A2 + A1^dagger A2^dagger>``, real
    * ``Gc_minus``: ``<A1^dagger A2 + A2^dagger A1>``, real
    * ``Gs_plus``: ``<A1^dagger A2^dagger - A1 A2>``, purely imaginary
    * ``Gs_minus``: ``<A1^dagger A2 - A2^dagger A1>``, purely imaginary

    ``J1`` and ``J2`` are carried along for :meth:`check_ranges`.
    """
    __slots__ = ('Gc1', 'Gc2', 'Gs1', 'Gs2', 'Gq1', 'Gq2', 'Gc_plus',
                 'Gc_minus', 'Gs_plus', 'Gs_minus', 'J1', 'J2')

    fields = __slots__[:10]

    def __init__(self, Gc1, Gc2, Gs1, Gs2, Gq1, Gq2, Gc_plus, Gc_minus,
                 Gs_plus, Gs_minus, J1, J2):
        self.Gc1, self.Gc2 = float(Gc1), float(Gc2)
        self.Gs1, self.Gs2 = complex(Gs1), complex(Gs2)
        self.Gq1, self.Gq2 = float(Gq1), float(Gq2)
        self.Gc_plus, self.Gc_minus = float(Gc_plus), float(Gc_minus)
        self.Gs_plus, self.Gs_minus = complex(Gs_plus), complex(Gs_minus)
        self.J1, self.J2 = float(J1), float(J2)

    def check_ranges(self, tol=RANGE_TOL):
        """Raise :exc:`BundleRangeError` if a value leaves the range
        allowed by ``|cos|, |sin| <= 1``, or if a G_s value has a real
        part."""
        s1, s2 = 2 * math.sqrt(self.J1), 2 * math.sqrt(self.J2)
        s12 = 2 * math.sqrt(self.J1 * self.J2)
        bounds = (('Gc1', self.Gc1, s1), ('Gc2', self.Gc2, s2),
                  ('Gs1', self.Gs1.imag, s1), ('Gs2', self.Gs2.imag, s2),
                  ('Gq1', self.Gq1, 2 * self.J1), ('Gq2', self.Gq2, 2 * self.J2),
                  ('Gc_plus', self.Gc_plus, s12), ('Gc_minus', self.Gc_minus, s12),
                  ('Gs_plus', self.Gs_plus.imag, s12),
                  ('Gs_minus', self.Gs_minus.imag, s12))
        for name, val, bound in bounds:
            if abs(val) > bound * (1 + tol) + tol:
                raise BundleRangeError('%s=%r exceeds its bound %r'
                                       % (name, val, bound))
        for name in ('Gs1', 'Gs2', 'Gs_plus', 'Gs_minus'):
            if abs(getattr(self, name).real) > 1e-13:
                raise BundleRangeError('%s=%r is not purely imaginary'
                                       % (name, getattr(self, name)))
        return self

    def to_dict(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __repr__(self):
        kw = ', '.join('%s=%r' % (name, getattr(self, name))
                       for name in self.fields)
        return '%s(%s)' % (self.__class__.__name__, kw)


def _normalized_sums(label, q, convention, tol, cutoff):
    # u_i(gamma) = s_i(gamma) / s_i(0) on a shared cutoff
    J1, J2 = label.J1, label.J2
    cutoff = _series_cutoff(J1, J2, q, tol, cutoff)
    e1 = mode_sum(J1, 0.0, q, cutoff, convention).real
    e2 = mode_sum(J2, 0.0, q, cutoff, convention).real

    def u(mode, gamma):
        if mode == 1:
            return mode_sum(J1, gamma, q, cutoff, convention) / e1
        return mode_sum(J2, gamma, q, cutoff, convention) / e2
    return u


def g_bundle(label, q, convention=DEFAULT_CONVENTION, tol=DEFAULT_SERIES_TOL,
             cutoff=None):
    """Evaluate the ten G functions for *label*. Each one is a
    combination ``F_q(...) / E_q`` of the series above, e.g.
    ``Gc1 = sqrt(J1) (F_q(gamma1) + F_q(-gamma1)) / E_q``, and the
    bundle is range-checked before it is returned.

    The series are cut where :func:`~bicoherent.qmath.tail_bound` drops
    below *tol*. A fixed *cutoff* is only accepted if its tail bound
    meets *tol* too; otherwise :exc:`~bicoherent.states.CutoffError` is
    raised.

    >>> gb = g_bundle(CoherentLabel(0.25, 0.0, 1.0, 0.0), 0.5)
    >>> gb.Gc1, gb.Gq2, gb.Gs1
    (1.0, 2.0, 0j)
    """
    if not isinstance(label, CoherentLabel):
        label = CoherentLabel(*label)
    q = QValue(q)
    _check_convention(convention)
    label.check_domain(q)
    J1, g1, J2, g2 = label
    u = _normalized_sums(label, q, convention, tol, cutoff)
    u1, u2 = u(1, g1), u(2, g2)
    w1, w2 = u(1, (1 + q * q) * g1), u(2, (1 + q * q) * g2)
    r1, r2, r12 = math.sqrt(J1), math.sqrt(J2), math.sqrt(J1 * J2)
    plus = u1 * u2
    minus = u1 * u2.conjugate()
    gb = GBundle(Gc1=2 * r1 * u1.real, Gc2=2 * r2 * u2.real,
                 Gs1=complex(0, 2 * r1 * u1.imag),
                 Gs2=complex(0, 2 * r2 * u2.imag),
                 Gq1=2 * J1 * w1.real, Gq2=2 * J2 * w2.real,
                 Gc_plus=2 * r12 * plus.real, Gc_minus=2 * r12 * minus.real,
                 Gs_plus=complex(0, 2 * r12 * plus.imag),
                 Gs_minus=complex(0, 2 * r12 * minus.imag),
                 J1=J1, J2=J2)
    return gb.check_ranges()


def ladder_moments(label, q, convention=DEFAULT_CONVENTION,
                   tol=DEFAULT_SERIES_TOL, cutoff=None):
    """Closed forms of ``<A_i>``, ``<A_i^dagger>`` and the sixteen ordered
    products of two ladder operators, keyed by space-separated names
    from :data:`LADDER_NAMES` (``'A1'``, ``'A1d'``, ``'A1d A2'``, ...).

    Within one mode ``<A^dagger A> = J`` and ``<A A^dagger> = 1 + q**2 J``;
    ``<A A> = (J / E) F_q(-(1 + q**2) gamma)`` and its conjugate for the
    raising pair. Operators on different modes factorize.

    >>> m = ladder_moments(CoherentLabel(0.5, 0.0, 0.0, 0.0), 1.0)
    >>> m['A1d A1'], m['A1 A1d'], len(m)
    (0.5, 1.5, 20)
    """
    if not isinstance(label, CoherentLabel):
        label = CoherentLabel(*label)
    q = QValue(q)
    _check_convention(convention)
    label.check_domain(q)
    u = _normalized_sums(label, q, convention, tol, cutoff)
    q2 = float(q) ** 2
    single = {}
    for mode, J, gamma in ((1, label.J1, label.gamma1),
                           (2, label.J2, label.gamma2)):
        lower = math.sqrt(J) * u(mode, -gamma)
        lower2 = J * u(mode, -(1 + q2) * gamma)
        a, ad = 'A%d' % mode, 'A%dd' % mode
        single[a] = lower
        single[ad] = lower.conjugate()
        single[a + ' ' + a] = lower2
        single[ad + ' ' + ad] = lower2.conjugate()
        single[ad + ' ' + a] = J
        single[a + ' ' + ad] = 1 + q2 * J
    ret = {name: single[name] for name in LADDER_NAMES}
    for left in LADDER_NAMES:
        for right in LADDER_NAMES:
            key = left + ' ' + right
            if left[1] == right[1]:
                ret[key] = single[key]
            else:
                ret[key] = single[left] * single[right]
    return ret
