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
"""Normalized two-mode coherent state vectors on a truncated Fock
space.

A :class:`CoherentLabel` ``(J1, gamma1, J2, gamma2)`` together with a
deformation parameter ``q`` selects the state with amplitudes

    c(n1, n2) = J1**(n1/2) J2**(n2/2) exp(-i (gamma1 [n1]_q + gamma2 [n2]_q))
                / sqrt([n1]_q! [n2]_q! E_q(J1, J2))

The amplitudes are computed on a basis large enough that the neglected
weight stays below a tolerance, and the vector is renormalized on the
truncated space:

>>> state = build_coherent_vector(CoherentLabel(0.7, 1.3, 0.4, -0.5), 0.6)
>>> state.truncation_error < 1e-13
True
>>> abs(state.norm() - 1.0) < 1e-12
True

Time evolution under the deformed Hamiltonian only shifts the phase
labels, ``gamma_i -> gamma_i + lambda_i t / m`` (see :func:`evolve`),
and the energy expectation equals ``(lambda1 J1 + lambda2 J2) / m``
(see :func:`action_identity_check`).
"""

import logging
import math

import numpy as np
from boltons.typeutils import make_sentinel

from .fock import build_basis, hamiltonian_diagonal, ladder_matrices, propagator
from .qmath import (DomainError, QValue, pick_cutoff, q_ints, q_radius,
                    series_terms, tail_bound)


__all__ = ['AUTO', 'StateError', 'CutoffError', 'CoherentLabel',
           'StateVector', 'normalization_Eq', 'truncation_error',
           'choose_cutoff', 'build_coherent_vector', 'glauber_vector',
           'evolve', 'evolve_vector', 'action_identity_check']


log = logging.getLogger(__name__)

AUTO = make_sentinel('AUTO', var_name='AUTO')

DEFAULT_SERIES_TOL = 1e-15
DEFAULT_STATE_TOL = 1e-13
DEFAULT_MAX_CUTOFF = 64
NORM_TOL = 1e-12
STATE_CONVENTIONS = ('deformed', 'undeformed')


class StateError(ValueError):
    pass


class CutoffError(StateError):
    """Raised when no cutoff up to the configured maximum brings the
    neglected weight of a state below the requested tolerance."""
    pass


def _finite(name, value):
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise StateError('expected finite %s, not %r' % (name, value))
    return value


class CoherentLabel:
    """The label ``(J1, gamma1, J2, gamma2)`` of a two-mode coherent
    state. Actions must be non-negative; the bound ``J_i < 1/(1 - q**2)``
    depends on ``q`` and is checked by :meth:`check_domain` when a state
    or a series is evaluated, not here.

    >>> CoherentLabel(0.5, 0.1)
    CoherentLabel(J1=0.5, gamma1=0.1, J2=0.0, gamma2=0.0)
    >>> CoherentLabel(-1.0)
    Traceback (most recent call last):
      ...
    StateError: expected J1 >= 0, not -1.0
    """
    __slots__ = ('J1', 'gamma1', 'J2', 'gamma2')

    def __init__(self, J1=0.0, gamma1=0.0, J2=0.0, gamma2=0.0):
        for name, J in (('J1', J1), ('J2', J2)):
            if not _finite(name, J) >= 0:
                raise StateError('expected %s >= 0, not %r' % (name, float(J)))
        self.J1 = float(J1)
        self.J2 = float(J2)
        self.gamma1 = _finite('gamma1', gamma1)
        self.gamma2 = _finite('gamma2', gamma2)

    def check_domain(self, q):
        "Raise :exc:`~bicoherent.qmath.DomainError` unless both ``J_i < 1/(1 - q**2)``."
        radius = q_radius(q)
        for name, J in (('J1', self.J1), ('J2', self.J2)):
            if not J < radius:
                raise DomainError('expected %s < %r for q=%r, not %r'
                                  % (name, radius, float(q), J))
        return self

    def to_dict(self):
        return {'J1': self.J1, 'gamma1': self.gamma1,
                'J2': self.J2, 'gamma2': self.gamma2}

    def replace(self, **kw):
        vals = self.to_dict()
        vals.update(kw)
        return self.__class__(**vals)

    def __iter__(self):
        return iter((self.J1, self.gamma1, self.J2, self.gamma2))

    def __eq__(self, other):
        return (isinstance(other, CoherentLabel)
                and tuple(self) == tuple(other))

    def __hash__(self):
        return hash((CoherentLabel,) + tuple(self))

    def __repr__(self):
        cn = self.__class__.__name__
        return ('%s(J1=%r, gamma1=%r, J2=%r, gamma2=%r)'
                % ((cn,) + tuple(self)))


def _weight_q(q, convention):
    if convention not in STATE_CONVENTIONS:
        raise StateError('expected state convention in %r, not %r'
                         % (STATE_CONVENTIONS, convention))
    return QValue(q) if convention == 'deformed' else QValue(1.0)


def normalization_Eq(J1, J2, q, tol=DEFAULT_SERIES_TOL):
    """The normalization ``E_q(J1, J2) = sum J1**n1 J2**n2 / ([n1]_q! [n2]_q!)``.

    The double sum factorizes, so it is evaluated as the product of two
    compensated single-mode sums, truncated where
    :func:`~bicoherent.qmath.tail_bound` drops below *tol*.

    >>> normalization_Eq(0.0, 0.0, 0.3)
    1.0
    >>> round(normalization_Eq(1.0, 2.0, 1.0), 7)
    20.0855369
    """
    q = QValue(q)
    N = pick_cutoff(J1, J2, q, tol)
    return (math.fsum(series_terms(J1, q, N))
            * math.fsum(series_terms(J2, q, N)))


def truncation_error(J1, J2, q, cutoff):
    """Upper bound on the fraction of the weight of the state
    ``|J1, J2>`` that lies outside a basis with *cutoff* levels per mode.
    """
    q = QValue(q)
    cutoff = int(cutoff)
    tail = tail_bound(J1, J2, q, cutoff)
    if tail == 0.0:
        return 0.0
    head = (math.fsum(series_terms(J1, q, cutoff))
            * math.fsum(series_terms(J2, q, cutoff)))
    return tail / (head + tail)


def choose_cutoff(J1, J2, q, tol=DEFAULT_STATE_TOL,
                  max_cutoff=DEFAULT_MAX_CUTOFF):
    """Smallest cutoff ``N >= 2`` whose :func:`truncation_error` is at
    most *tol*.

    >>> choose_cutoff(0.0, 0.0, 0.5)
    2
    >>> choose_cutoff(1.0, 1.0, 0.5, max_cutoff=32)
    Traceback (most recent call last):
      ...
    CutoffError: neglected weight ... at the maximum cutoff 32 exceeds 1e-13 ...
    """
    q = QValue(q)
    max_cutoff = int(max_cutoff)
    if max_cutoff < 2:
        raise StateError('expected max_cutoff >= 2, not %r' % max_cutoff)
    err = truncation_error(J1, J2, q, max_cutoff)
    if err > tol:
        raise CutoffError('neglected weight %.1e at the maximum cutoff %r'
                          ' exceeds %r for J=(%r, %r), q=%r'
                          % (err, max_cutoff, tol, float(J1), float(J2),
                             float(q)))
    lo, hi = 1, max_cutoff
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if truncation_error(J1, J2, q, mid) <= tol:
            hi = mid
        else:
            lo = mid
    log.debug('cutoff %d for J=(%r, %r), q=%r, tol=%r',
              hi, J1, J2, float(q), tol)
    return hi


class StateVector:
    """An immutable normalized vector on a :class:`~bicoherent.fock.FockBasis`.

    Args:
        basis (FockBasis): the truncated basis
        amplitudes: complex amplitudes of length ``basis.dim``, in
            basis index order; must have unit norm within ``1e-12``
        truncation_error (float): bound on the weight neglected by the
            truncation, ``0`` for states that live in the basis exactly
        label (CoherentLabel): the label the state was built from, if any
        q (float): the deformation parameter in force
        convention (str): the state convention, if built from a label
    """
    __slots__ = ('basis', 'amplitudes', 'truncation_error',
                 'label', 'q', 'convention')

    def __init__(self, basis, amplitudes, truncation_error=0.0,
                 label=None, q=1.0, convention=None):
        amps = np.array(amplitudes, dtype=complex)
        if amps.shape != (basis.dim,):
            raise StateError('expected %r amplitudes for %r, not shape %r'
                             % (basis.dim, basis, amps.shape))
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise StateError('state is not normalized (norm**2 = %r)' % norm2)
        amps.flags.writeable = False
        self.basis = basis
        self.amplitudes = amps
        if not truncation_error >= 0:
            raise StateError('expected truncation_error >= 0, not %r'
                             % (truncation_error,))
        self.truncation_error = float(truncation_error)
        self.label = label
        self.q = QValue(q)
        self.convention = convention

    @property
    def cutoff(self):
        return self.basis.cutoff

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        "The inner product ``<self|other>``."
        if other.basis != self.basis:
            raise StateError('cannot overlap states on %r and %r'
                             % (self.basis, other.basis))
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def distance(self, other):
        "Euclidean norm of the difference of the two vectors."
        if other.basis != self.basis:
            raise StateError('cannot compare states on %r and %r'
                             % (self.basis, other.basis))
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))

    def as_grid(self):
        "The amplitudes as an ``(N, N)`` array indexed by ``(n1, n2)``."
        return self.amplitudes.reshape(self.cutoff, self.cutoff)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def with_amplitudes(self, amplitudes, label=None):
        return self.__class__(self.basis, amplitudes, self.truncation_error,
                              label=label, q=self.q,
                              convention=self.convention)

    def __repr__(self):
        return ('%s(basis=%r, label=%r, q=%r, truncation_error=%r)'
                % (self.__class__.__name__, self.basis, self.label,
                   float(self.q), self.truncation_error))


def _mode_amplitudes(J, gamma, q, N):
    return (np.sqrt(series_terms(J, q, N))
            * np.exp(-1j * gamma * np.asarray(q_ints(N, q))))


def build_coherent_vector(label, q, basis=AUTO, convention='deformed',
                          tol=DEFAULT_STATE_TOL, max_cutoff=DEFAULT_MAX_CUTOFF):
    """Build the normalized coherent state for *label*.

    With convention ``'deformed'`` the weights and phases use
    q-factorials and q-integers. ``'undeformed'`` builds the canonical
    state with ``n!`` and ``n`` whatever *q* is; the two coincide at
    ``q == 1``.

    If *basis* is :data:`AUTO` the cutoff is chosen with
    :func:`choose_cutoff`. An explicit basis whose neglected weight
    exceeds *tol* raises :exc:`CutoffError`.

    >>> vac = build_coherent_vector(CoherentLabel(), 0.5, basis=build_basis(3))
    >>> complex(vac.amplitudes[0]), vac.truncation_error
    ((1+0j), 0.0)
    """
    if not isinstance(label, CoherentLabel):
        label = CoherentLabel(*label)
    q = QValue(q)
    wq = _weight_q(q, convention)
    label.check_domain(wq)
    if basis is AUTO:
        basis = build_basis(choose_cutoff(label.J1, label.J2, wq,
                                          tol=tol, max_cutoff=max_cutoff))
    err = truncation_error(label.J1, label.J2, wq, basis.cutoff)
    if err > tol:
        raise CutoffError('neglected weight %.1e exceeds %r on %r'
                          % (err, tol, basis))
    N = basis.cutoff
    amps = np.kron(_mode_amplitudes(label.J1, label.gamma1, wq, N),
                   _mode_amplitudes(label.J2, label.gamma2, wq, N))
    amps /= np.linalg.norm(amps)
    return StateVector(basis, amps, err, label=label, q=q,
                       convention=convention)


def glauber_vector(z1, z2, basis):
    """The canonical (Glauber) coherent state ``|z1> (x) |z2>``,
    renormalized on *basis*. The coherent label ``(J, gamma)`` at
    ``q == 1`` corresponds to ``z = sqrt(J) exp(-i gamma)``.

    >>> g = glauber_vector(0, 0, build_basis(2))
    >>> g.amplitudes.real.tolist()
    [1.0, 0.0, 0.0, 0.0]
    """
    N = basis.cutoff
    vecs = []
    for z in (complex(z1), complex(z2)):
        ratios = z / np.sqrt(np.arange(1, N))
        vecs.append(np.concatenate(([1.0 + 0j], np.cumprod(ratios))))
    amps = np.kron(*vecs)
    amps /= np.linalg.norm(amps)
    return StateVector(basis, amps, q=1.0)


def evolve(label, t, params):
    """Evolve *label* for time *t* under the Hamiltonian of *params*:
    ``gamma_i -> gamma_i + lambda_i t / m``, actions unchanged.

    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> evolve(CoherentLabel(0.5, 0.0, 0.2, 1.0), 0.0, derive_params(PhysicalInputs()))
    CoherentLabel(J1=0.5, gamma1=0.0, J2=0.2, gamma2=1.0)
    """
    t = float(t)
    return label.replace(gamma1=label.gamma1 + params.lambda1 * t / params.m,
                         gamma2=label.gamma2 + params.lambda2 * t / params.m)


def evolve_vector(state, t, params, method='diagonal'):
    """Apply ``exp(-i H t)`` to *state*, where ``H`` is the deformed
    Hamiltonian for the deformation parameter of the state. The label,
    if any, is evolved alongside. *method* is passed to
    :func:`~bicoherent.fock.propagator`.
    """
    t = float(t)
    if method == 'diagonal':
        diag = hamiltonian_diagonal(params, state.basis, state.q)
        amps = np.exp(-1j * t * diag) * state.amplitudes
    else:
        U = propagator(params, ladder_matrices(state.basis, state.q), t,
                       method=method)
        amps = U @ state.amplitudes
    label = None if state.label is None else evolve(state.label, t, params)
    return state.with_amplitudes(amps, label=label)


def action_identity_check(label, params, q=None, tol=DEFAULT_STATE_TOL,
                          max_cutoff=DEFAULT_MAX_CUTOFF):
    """Deviation ``<H> - (lambda1 J1 + lambda2 J2) / m`` of the energy
    expectation of the coherent state from the classical action
    combination. It vanishes for every ``q`` because
    ``<A_i^dagger A_i> = J_i``.

    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> params = derive_params(PhysicalInputs())
    >>> action_identity_check(CoherentLabel(), params)
    0.0
    """
    q = params.q if q is None else QValue(q)
    state = build_coherent_vector(label, q, tol=tol, max_cutoff=max_cutoff)
    energies = hamiltonian_diagonal(params, state.basis, q)
    expected = (params.lambda1 * label.J1 + params.lambda2 * label.J2) / params.m
    return math.fsum(state.probabilities() * energies) - expected
