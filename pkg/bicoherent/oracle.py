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
"""Brute-force expectation values on truncated state vectors.

This module recomputes, from explicit vectors and operator matrices,
every quantity that :mod:`bicoherent.series` and
:mod:`bicoherent.uncertainty` give in closed form, and reports the
differences without judging them:

>>> from bicoherent.model import derive_params, PhysicalInputs
>>> from bicoherent.states import CoherentLabel
>>> params = derive_params(PhysicalInputs(q=0.7, theta=0.4))
>>> reports = crosscheck(CoherentLabel(0.3, 0.4, 0.2, -1.1), params)
>>> len(reports), max(r.abs_diff for r in reports) < 1e-10
(32, True)

The oracle never multiplies two matrices: every moment is an inner
product of two vectors ``O |psi>``, so memory stays at a handful of
dense matrices and a few vectors.

Reports serialize to JSON lines with :func:`write_reports_jsonl`, one
object per identity, which makes runs easy to diff.
"""

import json
import logging

import numpy as np
from boltons.cacheutils import cachedproperty
from boltons.fileutils import atomic_save
from boltons.jsonutils import JSONLIterator
from boltons.namedutils import namedtuple

from .fock import DimensionError, build_basis, ladder_matrices
from .qmath import QValue
from .series import (CONVENTIONS, DEFAULT_CONVENTION, DEFAULT_SERIES_TOL,
                     LADDER_NAMES, g_bundle, ladder_moments)
from .states import AUTO, CoherentLabel, CutoffError, build_coherent_vector
from .uncertainty import (DEFAULT_TOL, SATURATION_TOL, VARIANCE_OF,
                          CommutatorBounds, VarianceSet, commutator_means,
                          first_moments, reports_from_moments,
                          variances_closed_form)


__all__ = ['CrossCheckReport', 'expectation', 'MatrixOracle', 'crosscheck',
           'oracle_gur_report', 'convention_evidence', 'write_reports_jsonl',
           'read_reports_jsonl']


log = logging.getLogger(__name__)

DEFAULT_CROSSCHECK_TOL = 1e-10
DEFAULT_ORACLE_MAX_CUTOFF = 48
HERMITIAN_IMAG_TOL = 1e-12
CANONICAL_NAMES = ('X1', 'X2', 'P1', 'P2')
_ADJOINT = {'A1': 'A1d', 'A1d': 'A1', 'A2': 'A2d', 'A2d': 'A2'}


_CrossCheckReport = namedtuple('CrossCheckReport', 'quantity closed_form'
                               ' matrix_value abs_diff cutoff_used'
                               ' tail_estimate')


class CrossCheckReport(_CrossCheckReport):
    """One identity compared both ways. ``abs_diff`` is
    ``|closed_form - matrix_value|``, reported as is."""
    __slots__ = ()

    def to_dict(self):
        ret = self._asdict()
        for key in ('closed_form', 'matrix_value'):
            val = complex(ret[key])
            ret[key] = [val.real, val.imag]
        return ret

    @classmethod
    def from_dict(cls, d):
        kw = dict(d)
        for key in ('closed_form', 'matrix_value'):
            kw[key] = complex(*kw[key])
        return cls(**kw)


def expectation(state, M):
    """``<psi|M|psi>`` for a :class:`~bicoherent.states.StateVector`
    and an :class:`~bicoherent.fock.OperatorMatrix`. For a matrix with
    ``hermitian_hint`` the imaginary part must be rounding noise.

    >>> from bicoherent.states import glauber_vector
    >>> from bicoherent.fock import build_basis, ladder_matrices
    >>> vac = glauber_vector(0, 0, build_basis(4))
    >>> expectation(vac, ladder_matrices(vac.basis, 0.5).number(1))
    0j
    """
    if M.dim != state.basis.dim:
        raise DimensionError('operator of dim %r on state of dim %r'
                             % (M.dim, state.basis.dim))
    psi = state.amplitudes
    ret = complex(np.vdot(psi, M @ psi))
    if M.hermitian_hint and abs(ret.imag) > HERMITIAN_IMAG_TOL * max(1.0, abs(ret)):
        raise DimensionError('Hermitian expectation has imaginary part %r'
                             % ret.imag)
    return ret


class MatrixOracle:
    """Moments of one state by explicit linear algebra.

    The ladder matrices are built on first use; vectors ``O |psi>`` are
    computed once per operator. Canonical operators are applied through
    the coefficient map of :class:`~bicoherent.model.CanonicalCoefficients`,
    which is the same map :func:`~bicoherent.fock.canonical_matrices`
    uses.
    """

    def __init__(self, state, params, q=None):
        self.state = state
        self.params = params
        self.q = state.q if q is None else QValue(q)
        self._vectors = {}

    @cachedproperty
    def ladders(self):
        return ladder_matrices(self.state.basis, self.q)

    def apply(self, name):
        "``O |psi>`` for a ladder name (``'A1'``, ``'A2d'``, ...) or ``'X1'`` .. ``'P2'``."
        try:
            return self._vectors[name]
        except KeyError:
            pass
        if name in LADDER_NAMES:
            op = getattr(self.ladders, name)
            vec = op @ self.state.amplitudes
        elif name in CANONICAL_NAMES:
            qmap = self.params.coefficients[name]
            quads = []
            for mode in (1, 2):
                a, ad = self.apply('A%d' % mode), self.apply('A%dd' % mode)
                quads.append(a + ad if qmap.kind == 'sum' else 1j * (a - ad))
            vec = qmap.mode1 * quads[0] + qmap.mode2 * quads[1]
        else:
            raise KeyError(name)
        self._vectors[name] = vec
        return vec

    def _bra(self, name):
        # <psi| O = (O^dagger |psi>)^dagger
        if name in LADDER_NAMES:
            return self.apply(_ADJOINT[name])
        return self.apply(name)

    def moment(self, *names):
        """``<psi| O1 O2 |psi>`` for one or two operator names.

        >>> from bicoherent.states import build_coherent_vector
        >>> from bicoherent.model import derive_params, PhysicalInputs
        >>> st = build_coherent_vector(CoherentLabel(0.4, 0.0, 0.0, 0.0), 1.0)
        >>> oracle = MatrixOracle(st, derive_params(PhysicalInputs()))
        >>> round(oracle.moment('A1d', 'A1').real, 12)
        0.4
        """
        if len(names) == 1:
            return complex(np.vdot(self.state.amplitudes,
                                   self.apply(names[0])))
        left, right = names
        return complex(np.vdot(self._bra(left), self.apply(right)))

    def variance(self, name):
        mean = self.moment(name)
        return (self.moment(name, name) - mean * mean).real

    def commutator(self, left, right):
        return self.moment(left, right) - self.moment(right, left)

    def variances(self):
        return VarianceSet(*[self.variance(n) for n in CANONICAL_NAMES])

    def commutator_means(self):
        return CommutatorBounds(*[self.commutator(pair[:2], pair[2:])
                                  for pair in CommutatorBounds._fields])


def _oracle_state(label, q, tol, cutoff, max_cutoff):
    if cutoff is None:
        state = build_coherent_vector(label, q, tol=tol / 100,
                                      max_cutoff=max_cutoff)
    else:
        state = build_coherent_vector(label, q, basis=build_basis(cutoff),
                                      tol=float('inf'))
    if state.truncation_error > tol / 10:
        raise CutoffError('state truncation error %.1e exceeds %r at %r'
                          % (state.truncation_error, tol / 10, state.basis))
    return state


def crosscheck(label, params, q=None, tol=DEFAULT_CROSSCHECK_TOL,
               convention=DEFAULT_CONVENTION, cutoff=None,
               max_cutoff=DEFAULT_ORACLE_MAX_CUTOFF,
               series_tol=DEFAULT_SERIES_TOL):
    """Compare every closed form against the matrix oracle for *label*.

    Returns 32 :class:`CrossCheckReport` entries: the sixteen ordered
    ladder bilinears (``'<A1d A2>'``, ...), the four first moments
    (``'<X1>'``, ...), the four second moments (``'<X1^2>'``, ...), the
    four variances (``'var X1'``, ...) and the four commutator means
    (``'<[X1,X2]>'``, ...).

    The state is built on an automatically sized basis whose neglected
    weight is at most ``tol / 100``; a fixed *cutoff* may be given
    instead, and :exc:`~bicoherent.states.CutoffError` is raised when
    its neglected weight exceeds ``tol / 10``.
    """
    if not isinstance(label, CoherentLabel):
        label = CoherentLabel(*label)
    q = params.q if q is None else QValue(q)
    state = _oracle_state(label, q, tol, cutoff, max_cutoff)
    oracle = MatrixOracle(state, params, q)
    N, tail = state.cutoff, state.truncation_error

    def report(quantity, closed, matrix):
        closed, matrix = complex(closed), complex(matrix)
        return CrossCheckReport(quantity, closed, matrix, abs(closed - matrix),
                                N, tail)

    ret = []
    moments = ladder_moments(label, q, convention, series_tol)
    for left in LADDER_NAMES:
        for right in LADDER_NAMES:
            key = left + ' ' + right
            ret.append(report('<%s>' % key, moments[key],
                              oracle.moment(left, right)))
    gb = g_bundle(label, q, convention, series_tol)
    means = first_moments(label, params, q, gb)
    variances = variances_closed_form(label, params, q, gb, strict=False)
    for name in CANONICAL_NAMES:
        ret.append(report('<%s>' % name, getattr(means, name),
                          oracle.moment(name)))
    for name in CANONICAL_NAMES:
        closed = (getattr(variances, VARIANCE_OF[name])
                  + getattr(means, name) ** 2)
        ret.append(report('<%s^2>' % name, closed, oracle.moment(name, name)))
    for name in CANONICAL_NAMES:
        ret.append(report('var %s' % name,
                          getattr(variances, VARIANCE_OF[name]),
                          oracle.variance(name)))
    closed_comm = commutator_means(label, params, q)
    matrix_comm = oracle.commutator_means()
    for pair in CommutatorBounds._fields:
        ret.append(report('<[%s,%s]>' % (pair[:2], pair[2:]),
                          getattr(closed_comm, pair),
                          getattr(matrix_comm, pair)))
    log.debug('crosscheck of %r at q=%r, N=%d: max abs_diff %.3e', label,
              float(q), N, max(r.abs_diff for r in ret))
    return ret


def oracle_gur_report(label, params, q=None, tol=DEFAULT_TOL,
                      saturation_tol=SATURATION_TOL, state_tol=1e-12,
                      max_cutoff=DEFAULT_ORACLE_MAX_CUTOFF, state=AUTO):
    """Matrix version of :func:`~bicoherent.uncertainty.gur_report`:
    variances and commutator means taken from the state vector."""
    if not isinstance(label, CoherentLabel):
        label = CoherentLabel(*label)
    q = params.q if q is None else QValue(q)
    if state is AUTO:
        state = build_coherent_vector(label, q, tol=state_tol,
                                      max_cutoff=max_cutoff)
    oracle = MatrixOracle(state, params, q)
    variances = VarianceSet(*[max(v, 0.0) for v in oracle.variances()])
    rhs = CommutatorBounds(*[abs(m) / 2 for m in oracle.commutator_means()])
    return reports_from_moments(variances, rhs, tol, saturation_tol)


def convention_evidence(label, params, q=None, tol=DEFAULT_CROSSCHECK_TOL,
                        max_cutoff=DEFAULT_ORACLE_MAX_CUTOFF):
    """Largest crosscheck discrepancy under each series convention, for
    the same state. Only ``'spectral-gap'`` is expected to agree with
    the matrices; the gap for ``'paper-literal'`` is logged.

    Returns:
        dict: convention -> max ``abs_diff``
    """
    ret = {}
    for convention in CONVENTIONS:
        reports = crosscheck(label, params, q, tol, convention,
                             max_cutoff=max_cutoff)
        ret[convention] = max(r.abs_diff for r in reports)
    log.info('convention evidence for %r: %s', label,
             ', '.join('%s=%.3e' % item for item in ret.items()))
    return ret


def write_reports_jsonl(reports, path):
    """Atomically write *reports* to *path*, one JSON object per line."""
    with atomic_save(path, text_mode=True) as f:
        for rep in reports:
            f.write(json.dumps(rep.to_dict(), sort_keys=True) + '\n')
    return path


def read_reports_jsonl(path):
    "Read back a list of :class:`CrossCheckReport` written by :func:`write_reports_jsonl`."
    with open(path) as f:
        return [CrossCheckReport.from_dict(d) for d in JSONLIterator(f)]
