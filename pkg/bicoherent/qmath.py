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

"""q-deformed combinatorics for the two-mode oscillator series.

Every series in this package is built out of q-integers,

.. math::  [n]_q = \\frac{1 - q^{2n}}{1 - q^2},

their running products (q-factorials), and the weights
``J**n / [n]_q!``. This module provides those building blocks along
with the convergence radius of the q-exponential series and rigorous
tail bounds used to pick summation cutoffs.

>>> round(q_int(2, 0.5), 12)
1.25
>>> q_factorial(3, 1.0)
6.0
>>> round(q_radius(0.5), 12)
1.333333333333

The undeformed point ``q == 1`` is a removable singularity of
:func:`q_int` and is handled by an explicit branch, so that
``q_int(n, 1.0) == n`` exactly.

Prefix tables are memoized per ``(q, size)`` in a
:class:`boltons.cacheutils.LRU`, which locks internally and is
therefore safe to share between threads. Returned arrays are marked
read-only.
"""

import math

import numpy as np
from boltons.cacheutils import LRU, cached


__all__ = ['QValue', 'QMathError', 'DomainError', 'QRangeError',
           'q_int', 'q_ints', 'q_gap', 'q_factorial', 'q_factorials',
           'q_radius', 'series_terms', 'single_tail_bound', 'tail_bound',
           'pick_cutoff']


TABLE_CACHE_SIZE = 256
_MAX_CUTOFF_SEARCH = 1 << 16


class QMathError(ValueError):
    pass


class DomainError(QMathError):
    """Raised when a deformation parameter or a coherent label falls
    outside the region where the q-exponential series converges."""
    pass


class QRangeError(QMathError, OverflowError):
    pass


class QValue(float):
    """A :class:`float` constrained to the deformation range ``0 < q <= 1``.

    >>> QValue(0.5)
    QValue(0.5)
    >>> QValue(1).is_undeformed
    True
    >>> QValue(1.5)
    Traceback (most recent call last):
      ...
    DomainError: expected deformation parameter 0 < q <= 1, not 1.5
    """
    __slots__ = ()

    def __new__(cls, value):
        if isinstance(value, QValue):
            return value
        value = float(value)
        if not 0.0 < value <= 1.0:
            raise DomainError('expected deformation parameter 0 < q <= 1,'
                              ' not %r' % value)
        return super().__new__(cls, value)

    @property
    def is_undeformed(self):
        return float(self) == 1.0

    def __repr__(self):
        return f'{self.__class__.__name__}({float(self)!r})'

    def __reduce__(self):
        return (self.__class__, (float(self),))


def _log_q2(q):
    # log(q**2), exact to rounding even for q very close to 1
    return 2.0 * math.log(q)


def q_int(n, q):
    """Return the q-integer ``[n]_q = (1 - q**(2n)) / (1 - q**2)``.

    >>> q_int(0, 0.3)
    0.0
    >>> q_int(5, 1.0)
    5.0
    >>> round(q_int(2, 0.5), 12)
    1.25

    For ``q < 1`` the result increases with *n* and stays below
    :func:`q_radius`. Near ``q == 1`` the ratio is evaluated with
    :func:`math.expm1`, which keeps it continuous with the ``q == 1``
    branch.
    """
    n = int(n)
    if n < 0:
        raise QMathError('expected non-negative integer n, not %r' % n)
    q = QValue(q)
    if q.is_undeformed:
        return float(n)
    lq2 = _log_q2(q)
    return math.expm1(n * lq2) / math.expm1(lq2)


@cached(LRU(max_size=TABLE_CACHE_SIZE))
def q_ints(size, q):
    """Read-only array of ``[n]_q`` for ``n`` in ``0 .. size - 1``.

    >>> q_ints(4, 1.0)
    array([0., 1., 2., 3.])
    """
    size, q = int(size), QValue(q)
    n = np.arange(size, dtype=float)
    if q.is_undeformed:
        ret = n
    else:
        lq2 = _log_q2(q)
        ret = np.expm1(n * lq2) / math.expm1(lq2)
    ret.flags.writeable = False
    return ret


def q_gap(n, q):
    """The spectral gap ``[n+1]_q - [n]_q``, which telescopes to
    ``q**(2n)``.

    >>> q_gap(3, 0.5)
    0.015625
    """
    return float(QValue(q)) ** (2 * int(n))


@cached(LRU(max_size=TABLE_CACHE_SIZE))
def q_factorials(size, q):
    """Read-only array of ``[n]_q!`` for ``n`` in ``0 .. size - 1``,
    built incrementally as a running product. Entries that overflow
    are ``inf``; :func:`q_factorial` turns those into
    :exc:`QRangeError`.

    >>> q_factorials(5, 1.0)
    array([ 1.,  1.,  2.,  6., 24.])
    """
    ints = q_ints(size, q)
    ret = np.ones(len(ints))
    with np.errstate(over='ignore'):
        ret[1:] = np.cumprod(ints[1:])
    ret.flags.writeable = False
    return ret


def q_factorial(n, q):
    """Return ``[n]_q! = [1]_q [2]_q ... [n]_q``, with ``[0]_q! == 1``.

    >>> q_factorial(0, 0.7)
    1.0
    >>> round(q_factorial(2, 0.5), 12)
    1.25
    >>> q_factorial(200, 1.0)
    Traceback (most recent call last):
      ...
    QRangeError: [200]_q! overflows double precision at q=1.0
    """
    n = int(n)
    if n < 0:
        raise QMathError('expected non-negative integer n, not %r' % n)
    q = QValue(q)
    ret = float(q_factorials(n + 1, q)[n])
    if math.isinf(ret):
        raise QRangeError('[%d]_q! overflows double precision at q=%r'
                          % (n, float(q)))
    return ret


def q_radius(q):
    """Convergence radius ``1 / (1 - q**2)`` of the q-exponential series
    in *J*. Infinite in the undeformed case.

    >>> q_radius(1.0)
    inf
    >>> round(q_radius(1e-9), 12)
    1.0
    """
    q = QValue(q)
    if q.is_undeformed:
        return float('inf')
    return -1.0 / math.expm1(_log_q2(q))


def _check_J(J, q):
    J = float(J)
    radius = q_radius(q)
    if not 0.0 <= J < radius:
        raise DomainError('expected 0 <= J < %r for q=%r, not %r'
                          % (radius, float(q), J))
    return J


def series_terms(J, q, size):
    """Weights ``J**n / [n]_q!`` for ``n`` in ``0 .. size - 1``.

    The array is a running product of the ratios ``J / [n]_q``, which
    never overflows; far terms underflow harmlessly to zero.

    >>> series_terms(2.0, 1.0, 4)
    array([1.        , 2.        , 2.        , 1.33333333])
    >>> series_terms(0.0, 0.5, 3)
    array([1., 0., 0.])
    """
    q = QValue(q)
    J = _check_J(J, q)
    size = int(size)
    ret = np.ones(size)
    if size > 1:
        ret[1:] = np.cumprod(J / q_ints(size, q)[1:])
    return ret


def _tail_bound_1d(J, q, N):
    # bound on sum_{n >= N} J**n / [n]_q!, returned with the head sum
    if J == 0.0:
        return 0.0, 1.0
    if q.is_undeformed:
        limit = 0.0
    else:
        limit = J / q_radius(q)
    target = 0.5 * (1.0 + limit)
    # step past the terms whose ratio is not yet contracting enough
    n_star = N
    while J / q_int(n_star + 1, q) > target:
        n_star += 1
        if n_star > _MAX_CUTOFF_SEARCH:
            raise DomainError('no contracting tail found for J=%r, q=%r'
                              % (J, float(q)))
    terms = series_terms(J, q, n_star + 1)
    head = math.fsum(terms[:N])
    ratio = J / q_int(n_star + 1, q)
    tail = math.fsum(terms[N:n_star]) + terms[n_star] / (1.0 - ratio)
    return tail, head


def single_tail_bound(J, q, N):
    """Upper bound on the single-mode tail ``sum_{n >= N} J**n / [n]_q!``.

    Past some index ``n* >= N`` the term ratio ``J / [n+1]_q`` is at
    most ``r < 1``; the terms between *N* and ``n*`` are summed exactly
    and the rest is bounded by the geometric series ``t(n*) / (1 - r)``.

    >>> single_tail_bound(0.0, 0.5, 1)
    0.0
    >>> single_tail_bound(1.0, 1.0, 20) < 1e-18
    True
    """
    q = QValue(q)
    J = _check_J(J, q)
    if int(N) < 1:
        raise QMathError('expected cutoff N >= 1, not %r' % N)
    return _tail_bound_1d(J, q, int(N))[0]


def tail_bound(J1, J2, q, N):
    """Rigorous upper bound on the part of the double series
    ``sum J1**n1 J2**n2 / ([n1]_q! [n2]_q!)`` with ``max(n1, n2) >= N``.

    With head sums ``S_i`` and single-mode tail bounds ``T_i`` the
    neglected part is ``T1 (S2 + T2) + S1 T2``.

    >>> tail_bound(0, 0, 0.3, 1)
    0.0
    >>> tail_bound(1.0, 1.0, 0.5, 128) < 1e-12
    True
    >>> tail_bound(4 / 3, 0.1, 0.5, 10)
    Traceback (most recent call last):
      ...
    DomainError: expected 0 <= J < 1.3333333333333333 for q=0.5, not 1.3333333333333333
    """
    q = QValue(q)
    J1, J2 = _check_J(J1, q), _check_J(J2, q)
    N = int(N)
    if N < 1:
        raise QMathError('expected cutoff N >= 1, not %r' % N)
    t1, s1 = _tail_bound_1d(J1, q, N)
    t2, s2 = _tail_bound_1d(J2, q, N)
    return t1 * (s2 + t2) + s1 * t2


def pick_cutoff(J1, J2, q, tol, min_cutoff=1, max_cutoff=None):
    """Smallest cutoff ``N >= min_cutoff`` whose :func:`tail_bound` is at
    most *tol*. Raises :exc:`DomainError` if *max_cutoff* is given and
    reached first.

    >>> pick_cutoff(0.0, 0.0, 0.5, 1e-15)
    1
    >>> N = pick_cutoff(1.0, 2.0, 1.0, 1e-12)
    >>> tail_bound(1.0, 2.0, 1.0, N) <= 1e-12 < tail_bound(1.0, 2.0, 1.0, N - 1)
    True
    """
    tol = float(tol)
    if not tol > 0:
        raise QMathError('expected positive tolerance, not %r' % tol)
    if max_cutoff is None:
        max_cutoff = _MAX_CUTOFF_SEARCH
    lo = max(int(min_cutoff), 1)
    if tail_bound(J1, J2, q, lo) <= tol:
        return lo
    hi = lo
    while True:
        lo, hi = hi, min(2 * hi, max_cutoff)
        if tail_bound(J1, J2, q, hi) <= tol:
            break
        if hi >= max_cutoff:
            raise DomainError('tail bound for J=(%r, %r), q=%r exceeds %r'
                              ' at the maximum cutoff %r'
                              % (J1, J2, float(q), tol, max_cutoff))
    # the bound decreases with N, so bisect between lo (fails) and hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(J1, J2, q, mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi
