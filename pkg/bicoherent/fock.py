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

"""Truncated two-mode Fock space and the deformed ladder operators.

A :class:`FockBasis` with cutoff ``N`` holds the states ``|n1, n2>``
with ``0 <= n_i < N``, flattened as ``k = n1 * N + n2``:

>>> basis = build_basis(8)
>>> basis.dim, basis.index(3, 5), basis.occupations(29)
(64, 29, (3, 5))

Operators are dense complex matrices wrapped in :class:`OperatorMatrix`.
The deformed lowering operators act as
``A_i |n_i> = sqrt([n_i]_q) |n_i - 1>``; their adjoints raise, and
raising past the cutoff gives the zero vector. Identities of the
infinite-dimensional algebra therefore hold only on the *interior*
subspace ``n_i <= N - 2``, which is where every residual in this
module is measured:

>>> ladders = ladder_matrices(build_basis(6), 0.5)
>>> deformed_algebra_residual(ladders, 0.5, ladders.basis) < 1e-13
True
"""

import numpy as np
import scipy.linalg
from boltons.namedutils import namedtuple

from .qmath import QValue, q_ints


__all__ = ['FockError', 'DimensionError', 'FockBasis', 'OperatorMatrix',
           'LadderSet', 'CanonicalSet', 'SolvedForm', 'build_basis',
           'ladder_matrices', 'canonical_matrices', 'ladder_from_canonical',
           'algebra_residuals', 'deformed_algebra_residual',
           'commutator_rhs_matrices', 'verify_dynamical_commutators',
           'solved_commutator_forms', 'mode_occupation_values',
           'hamiltonian_diagonal', 'hamiltonian_matrix', 'propagator']


HERMITIAN_TOL = 1e-13
COMMUTATOR_PAIRS = ('X1X2', 'X1P1', 'X2P2', 'P1P2', 'X1P2', 'X2P1')


class FockError(ValueError):
    pass


class DimensionError(FockError):
    pass


class FockBasis:
    """Two-mode truncated basis with *cutoff* levels per mode.

    Args:
        cutoff (int): levels per mode, at least 2
    """
    __slots__ = ('cutoff', 'dim')

    def __init__(self, cutoff):
        try:
            cutoff = int(cutoff)
        except (TypeError, ValueError):
            raise FockError('expected integer cutoff, not %r' % (cutoff,))
        if cutoff < 2:
            raise FockError('expected cutoff >= 2, not %r' % cutoff)
        self.cutoff = cutoff
        self.dim = cutoff * cutoff

    def index(self, n1, n2):
        N = self.cutoff
        if not (0 <= n1 < N and 0 <= n2 < N):
            raise FockError('occupation (%r, %r) outside cutoff %r'
                            % (n1, n2, N))
        return n1 * N + n2

    def occupations(self, k):
        if not 0 <= k < self.dim:
            raise FockError('index %r outside dimension %r' % (k, self.dim))
        return divmod(int(k), self.cutoff)

    def __iter__(self):
        N = self.cutoff
        return ((n1, n2) for n1 in range(N) for n2 in range(N))

    def occupation_arrays(self):
        "Arrays ``(n1, n2)`` of length :attr:`dim`, in index order."
        n = np.arange(self.cutoff)
        return np.repeat(n, self.cutoff), np.tile(n, self.cutoff)

    def interior_indices(self):
        """Indices of the states with ``n1 <= N - 2`` and ``n2 <= N - 2``.

        >>> build_basis(3).interior_indices()
        array([0, 1, 3, 4])
        """
        n1, n2 = self.occupation_arrays()
        top = self.cutoff - 2
        return np.flatnonzero((n1 <= top) & (n2 <= top))

    def __eq__(self, other):
        return isinstance(other, FockBasis) and other.cutoff == self.cutoff

    def __hash__(self):
        return hash((FockBasis, self.cutoff))

    def __repr__(self):
        return f'{self.__class__.__name__}(cutoff={self.cutoff})'


def build_basis(N):
    """Build a :class:`FockBasis` with ``N`` levels per mode.

    >>> build_basis(2).dim
    4
    >>> build_basis(1)
    Traceback (most recent call last):
      ...
    FockError: expected cutoff >= 2, not 1
    """
    return FockBasis(N)


class OperatorMatrix:
    """A dense complex matrix on a truncated basis.

    If *hermitian_hint* is set, the matrix is checked on construction
    and must equal its adjoint to within ``1e-13``. Sums and real
    multiples of Hermitian matrices keep the hint; products drop it.

    >>> a = OperatorMatrix([[0, 1], [0, 0]])
    >>> (a + a.dag()).hermitian_hint
    False
    >>> OperatorMatrix([[0, 1j], [1j, 0]], hermitian_hint=True)
    Traceback (most recent call last):
      ...
    FockError: matrix is not Hermitian (residual 2.0)
    """
    __slots__ = ('entries', 'hermitian_hint')

    def __init__(self, entries, hermitian_hint=False):
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError('expected a square matrix, not shape %r'
                                 % (entries.shape,))
        self.entries = entries
        self.hermitian_hint = bool(hermitian_hint)
        if self.hermitian_hint:
            resid = self.hermitian_residual()
            if resid >= HERMITIAN_TOL:
                raise FockError('matrix is not Hermitian (residual %r)'
                                % resid)

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), hermitian_hint=True)

    @property
    def dim(self):
        return self.entries.shape[0]

    def hermitian_residual(self):
        return float(np.max(np.abs(self.entries - self.entries.conj().T),
                            initial=0.0))

    def dag(self):
        return OperatorMatrix(self.entries.conj().T, self.hermitian_hint)

    def _check_dim(self, other):
        if other.dim != self.dim:
            raise DimensionError('dimension mismatch: %r != %r'
                                 % (self.dim, other.dim))

    def __add__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        self._check_dim(other)
        return OperatorMatrix(self.entries + other.entries,
                              self.hermitian_hint and other.hermitian_hint)

    def __sub__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        self._check_dim(other)
        return OperatorMatrix(self.entries - other.entries,
                              self.hermitian_hint and other.hermitian_hint)

    def __neg__(self):
        return OperatorMatrix(-self.entries, self.hermitian_hint)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        scalar = complex(scalar)
        hint = self.hermitian_hint and scalar.imag == 0
        return OperatorMatrix(scalar * self.entries, hint)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_dim(other)
            return OperatorMatrix(self.entries @ other.entries)
        other = np.asarray(other)
        if other.shape[0] != self.dim:
            raise DimensionError('dimension mismatch: %r != %r'
                                 % (self.dim, other.shape[0]))
        return self.entries @ other

    def commutator(self, other):
        return self @ other - other @ self

    def max_abs(self, indices=None):
        "Max-norm, optionally restricted to the block ``indices x indices``."
        ent = self.entries
        if indices is not None:
            ent = ent[np.ix_(indices, indices)]
        return float(np.max(np.abs(ent), initial=0.0))

    def __repr__(self):
        return ('%s(dim=%r, hermitian_hint=%r)'
                % (self.__class__.__name__, self.dim, self.hermitian_hint))


class LadderSet:
    """The deformed lowering operators ``A1``, ``A2`` and their adjoints
    ``A1d``, ``A2d`` on one basis. The adjoints are constructed
    directly from the transposed single-mode matrix, not computed.
    """
    __slots__ = ('A1', 'A1d', 'A2', 'A2d', 'basis', 'q')

    def __init__(self, A1, A1d, A2, A2d, basis, q):
        for op in (A1, A1d, A2, A2d):
            if op.dim != basis.dim:
                raise DimensionError('ladder of dim %r on basis of dim %r'
                                     % (op.dim, basis.dim))
        self.A1, self.A1d, self.A2, self.A2d = A1, A1d, A2, A2d
        self.basis = basis
        self.q = QValue(q)

    def lowering(self, mode):
        return {1: self.A1, 2: self.A2}[mode]

    def raising(self, mode):
        return {1: self.A1d, 2: self.A2d}[mode]

    def number(self, mode):
        """``A_i^dagger A_i``, built directly as the diagonal matrix with
        entries ``[n_i]_q``."""
        return OperatorMatrix(np.diag(mode_occupation_values(
            self.basis, self.q, mode)), hermitian_hint=True)

    def identity(self):
        return OperatorMatrix.identity(self.basis.dim)

    def __repr__(self):
        return ('%s(basis=%r, q=%r)'
                % (self.__class__.__name__, self.basis, float(self.q)))


def mode_occupation_values(basis, q, mode):
    """The q-integers ``[n_i]_q`` of mode *mode* for every basis index.

    >>> mode_occupation_values(build_basis(2), 1.0, 2)
    array([0., 1., 0., 1.])
    """
    ints = np.asarray(q_ints(basis.cutoff, q))
    n1, n2 = basis.occupation_arrays()
    return ints[n1] if mode == 1 else ints[n2]


def _single_mode_lowering(N, q):
    return np.diag(np.sqrt(q_ints(N, q)[1:]), k=1)


def ladder_matrices(basis, q):
    """Matrices of the deformed ladder operators on *basis*. At
    ``q == 1`` these are the ordinary two-mode annihilation and creation
    operators.

    >>> ladders = ladder_matrices(build_basis(4), 0.5)
    >>> b = ladders.basis
    >>> round(float(ladders.A1.entries[b.index(1, 0), b.index(2, 0)].real), 7)
    1.118034
    """
    q = QValue(q)
    N = basis.cutoff
    a = _single_mode_lowering(N, q)
    eye = np.eye(N)
    A1 = OperatorMatrix(np.kron(a, eye))
    A1d = OperatorMatrix(np.kron(a.T, eye))
    A2 = OperatorMatrix(np.kron(eye, a))
    A2d = OperatorMatrix(np.kron(eye, a.T))
    return LadderSet(A1, A1d, A2, A2d, basis, q)


CanonicalSet = namedtuple('CanonicalSet', 'X1 X2 P1 P2')


def _quadrature(ladders, mode, kind):
    A, Ad = ladders.lowering(mode), ladders.raising(mode)
    if kind == 'sum':
        return OperatorMatrix(A.entries + Ad.entries, hermitian_hint=True)
    return OperatorMatrix(1j * (A.entries - Ad.entries), hermitian_hint=True)


def canonical_matrices(params, ladders):
    """Position and momentum matrices built from *ladders* with the
    coefficients of :class:`~bicoherent.model.CanonicalCoefficients`.
    All four are Hermitian.

    Returns:
        CanonicalSet: namedtuple of :class:`OperatorMatrix` ``X1, X2, P1, P2``
    """
    dims = {op.dim for op in (ladders.A1, ladders.A1d,
                              ladders.A2, ladders.A2d)}
    if len(dims) != 1:
        raise DimensionError('inconsistent ladder dimensions: %r'
                             % sorted(dims))
    coeffs = params.coefficients
    quads = {(mode, kind): _quadrature(ladders, mode, kind)
             for mode in (1, 2) for kind in ('sum', 'diff')}
    ops = []
    for _, qmap in coeffs.items():
        op = (qmap.mode1 * quads[1, qmap.kind]
              + qmap.mode2 * quads[2, qmap.kind])
        ops.append(OperatorMatrix(op.entries, hermitian_hint=True))
    return CanonicalSet(*ops)


def ladder_from_canonical(params, canonical):
    """Rebuild ``(A1, A2)`` from the canonical matrices through the
    inverse map. With the matrices of :func:`canonical_matrices` this
    reproduces the ladder operators."""
    inverse = params.coefficients.inverse
    ret = []
    for mode in (1, 2):
        entries = sum(coef * getattr(canonical, name).entries
                      for name, coef in inverse[mode].items())
        ret.append(OperatorMatrix(entries))
    return tuple(ret)


def algebra_residuals(ladders, q=None):
    """Interior max-norm of ``A_i A_j^ - ((q^2 - 1) d_ij + 1) A_j^ A_i - d_ij``
    for each ``(i, j)``.

    >>> res = algebra_residuals(ladder_matrices(build_basis(6), 1.0))
    >>> sorted(res), max(res.values()) < 1e-13
    ([(1, 1), (1, 2), (2, 1), (2, 2)], True)
    """
    q = ladders.q if q is None else QValue(q)
    q2 = float(q) ** 2
    inner = ladders.basis.interior_indices()
    eye = ladders.identity()
    ret = {}
    for i in (1, 2):
        for j in (1, 2):
            delta = 1.0 if i == j else 0.0
            resid = (ladders.lowering(i) @ ladders.raising(j)
                     - ((q2 - 1) * delta + 1) * (ladders.raising(j)
                                                 @ ladders.lowering(i))
                     - delta * eye)
            ret[i, j] = resid.max_abs(inner)
    return ret


def deformed_algebra_residual(ladders, q, basis):
    """Largest interior residual of the deformed oscillator algebra,
    across both modes and the mixed relations."""
    if basis.dim != ladders.basis.dim:
        raise DimensionError('ladders built on %r, not %r'
                             % (ladders.basis, basis))
    return max(algebra_residuals(ladders, q).values())


def commutator_rhs_matrices(params, ladders, q=None):
    """Right-hand sides of the deformed canonical commutators as
    matrices, built from ``K_i A_i^dagger A_i``. Keys are the pair tags
    of :data:`COMMUTATOR_PAIRS`."""
    q = ladders.q if q is None else QValue(q)
    dq = 1.0 - float(q) ** 2
    hbar, theta = params.hbar, params.theta
    l1, l2, K1, K2 = params.lambda1, params.lambda2, params.K1, params.K2
    c = 1.0 / (2 * params.Lambda ** 2)
    N1, N2 = ladders.number(1), ladders.number(2)
    eye = ladders.identity()
    zero = 0.0 * eye
    xp = (1j * hbar) * eye - (dq * 1j * hbar * c) * (l1 * K2 * N2 + l2 * K1 * N1)
    return {
        'X1X2': (1j * theta) * eye + (dq * 1j * hbar ** 2 * c) * (K2 * N2 - K1 * N1),
        'X1P1': xp,
        'X2P2': xp,
        'P1P2': (1j * dq * c) * (l1 ** 2 * K2 * N2 - l2 ** 2 * K1 * N1),
        'X1P2': zero,
        'X2P1': zero,
    }


def _pair(canonical, tag):
    return getattr(canonical, tag[:2]), getattr(canonical, tag[2:])


def _number_expansions(params, canonical):
    # K_i A_i^ A_i rewritten as quadratic forms in the canonical operators
    X1, X2, P1, P2 = canonical
    hbar, l1, l2 = params.hbar, params.lambda1, params.lambda2
    quad = {}
    for mode, lam, sgn in ((1, l1, -1), (2, l2, 1)):
        r = lam / hbar
        quad[mode] = (r ** 2 * (X1 @ X1) + r ** 2 * (X2 @ X2) + P1 @ P1
                      + P2 @ P2 + (sgn * 2 * r) * (X1 @ P2)
                      - (sgn * 2 * r) * (X2 @ P1)
                      + (-sgn * 1j * r ** 2) * X1.commutator(X2)
                      + (1j * r) * X1.commutator(P1)
                      + (1j * r) * X2.commutator(P2)
                      + (-sgn * 1j) * P1.commutator(P2))
    return quad


def verify_dynamical_commutators(params, basis, q=None):
    """Residuals of the deformed canonical commutators on the interior
    of *basis*.

    For each pair the matrix commutator of the canonical operators is
    compared with the right-hand side from
    :func:`commutator_rhs_matrices`. The entries ``'number1'`` and
    ``'number2'`` check that ``K_i A_i^dagger A_i`` equals its quadratic
    expansion in positions and momenta.

    Returns:
        dict: tag -> interior max-norm residual
    """
    q = params.q if q is None else QValue(q)
    ladders = ladder_matrices(basis, q)
    canonical = canonical_matrices(params, ladders)
    inner = basis.interior_indices()
    rhs = commutator_rhs_matrices(params, ladders, q)
    ret = {}
    for tag in COMMUTATOR_PAIRS:
        left, right = _pair(canonical, tag)
        ret[tag] = (left.commutator(right) - rhs[tag]).max_abs(inner)
    quad = _number_expansions(params, canonical)
    for mode, K in ((1, params.K1), (2, params.K2)):
        ret['number%d' % mode] = (K * ladders.number(mode)
                                  - quad[mode]).max_abs(inner)
    return ret


SolvedForm = namedtuple('SolvedForm', 'pair lhs rhs discrepancy terms')


def solved_commutator_forms(params, state, q=None):
    """Evaluate both sides of the closed "solved" commutator relations
    in *state*: each commutator of canonical operators against an
    expression quadratic in positions and momenta.

    This is a diagnostic; nothing is asserted. The quadratic sides carry
    factors such as ``(lambda1 + lambda2 - 1)`` that only make sense in
    dimensionless units, and they are not expected to agree with the
    commutator expectation away from ``q == 1``.

    Returns:
        dict: pair tag -> :class:`SolvedForm` whose *terms* map a term
        name (``'constant'``, ``'position'``, ``'momentum'``, ``'mixed'``)
        to its contribution to *rhs*
    """
    q = params.q if q is None else QValue(q)
    basis = state.basis
    psi = np.asarray(state.amplitudes)
    canonical = canonical_matrices(params, ladder_matrices(basis, q))
    vecs = {name: getattr(canonical, name) @ psi for name in canonical._fields}

    def braket(a, b):
        return complex(np.vdot(vecs[a], vecs[b]))

    xx = (braket('X1', 'X1') + braket('X2', 'X2')).real
    pp = (braket('P1', 'P1') + braket('P2', 'P2')).real
    mixed = braket('X1', 'P2') - braket('X2', 'P1')

    hbar, theta = params.hbar, params.theta
    l1, l2, L = params.lambda1, params.lambda2, params.Lambda
    q2 = float(q) ** 2
    dq, sq = 1.0 - q2, 1.0 + q2
    pre = 1j * dq / sq
    l12 = l1 * l2
    terms = {
        'X1X2': {
            'constant': 2j * theta / sq,
            'position': pre * (l2 - l1) / L * xx,
            'momentum': 0j,
            'mixed': pre * 2 * hbar * (L ** 3 - dq * (L - 1) * l12) / L ** 4 * mixed,
        },
        'X1P1': {
            'constant': 2j * hbar / sq,
            'position': -pre * l12 / L * xx,
            'momentum': -pre * 2 * hbar / L * pp,
            'mixed': pre * 2 * dq * (l1 - l2) * (L - 1) * l12 / L ** 4 * mixed,
        },
        'P1P2': {
            'constant': 0j,
            'position': pre * (hbar - 1) * (l1 - l2) * l12 / (hbar ** 2 * L) * xx,
            'momentum': pre * 2 * (l1 - l2) / L * pp,
            'mixed': pre * l12 * ((2 * L ** 3 - sq * (L - 1) * L ** 2) / (hbar * L ** 4)
                                  - 2 * dq * (L - 1) * (l1 ** 2 + l2 ** 2 - l12)
                                  / (hbar * L ** 4)) * mixed,
        },
    }
    terms['X2P2'] = dict(terms['X1P1'])
    ret = {}
    for tag in ('X1X2', 'X1P1', 'X2P2', 'P1P2'):
        a, b = tag[:2], tag[2:]
        lhs = braket(a, b) - braket(b, a)
        rhs = sum(terms[tag].values())
        ret[tag] = SolvedForm(tag, lhs, rhs, lhs - rhs, terms[tag])
    return ret


def hamiltonian_diagonal(params, basis, q=None):
    """Eigenvalues ``(lambda1 [n1]_q + lambda2 [n2]_q) / m`` of the deformed
    Hamiltonian, one per basis index."""
    q = params.q if q is None else QValue(q)
    return (params.lambda1 * mode_occupation_values(basis, q, 1)
            + params.lambda2 * mode_occupation_values(basis, q, 2)) / params.m


def hamiltonian_matrix(params, ladders):
    """The deformed Hamiltonian ``(lambda1 N1 + lambda2 N2) / m`` on the
    basis of *ladders*, diagonal in the Fock basis."""
    diag = hamiltonian_diagonal(params, ladders.basis, ladders.q)
    return OperatorMatrix(np.diag(diag), hermitian_hint=True)


def propagator(params, ladders, t, method='diagonal'):
    """``exp(-i H t)`` on the truncated space.

    *method* ``'diagonal'`` exponentiates the diagonal of the
    Hamiltonian directly; ``'expm'`` runs :func:`scipy.linalg.expm` on
    the full matrix and is kept as an independent check.

    >>> ladders = ladder_matrices(build_basis(4), 0.6)
    >>> from bicoherent.model import derive_params, PhysicalInputs
    >>> params = derive_params(PhysicalInputs(q=0.6, theta=0.2))
    >>> U = propagator(params, ladders, 2.0)
    >>> V = propagator(params, ladders, 2.0, method='expm')
    >>> (U - V).max_abs() < 1e-12
    True
    """
    if method == 'diagonal':
        diag = hamiltonian_diagonal(params, ladders.basis, ladders.q)
        return OperatorMatrix(np.diag(np.exp(-1j * t * diag)))
    elif method == 'expm':
        H = hamiltonian_matrix(params, ladders)
        return OperatorMatrix(scipy.linalg.expm(-1j * t * H.entries))
    raise FockError('unknown propagator method: %r' % (method,))
