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

"""Oscillator constants for the two-dimensional noncommutative
harmonic oscillator.

The physical inputs (mass, frequency, Planck constant, the
noncommutativity parameter theta and the deformation parameter q)
determine two effective frequencies ``lambda1 >= lambda2`` and two
normalization constants ``K1``, ``K2``:

>>> params = derive_params(PhysicalInputs(theta=1.0))
>>> round(params.lambda1, 7), round(params.lambda2, 7)
(1.618034, 0.618034)
>>> round(params.lambda1 * params.lambda2, 12)
1.0

Everything is expressed in dimensionless code units, with defaults
``m = omega = hbar = 1``. At ``theta == 0`` both frequencies coincide:

>>> p0 = derive_params(PhysicalInputs())
>>> (p0.lambda1, p0.lambda2, p0.K1, p0.K2)
(1.0, 1.0, 4.0, 4.0)
"""

import math

from boltons.namedutils import namedtuple

from .qmath import QValue


__all__ = ['ModelError', 'InvariantError', 'PhysicalInputs', 'ModelParams',
           'QuadratureMap', 'CanonicalCoefficients', 'derive_params']


class ModelError(ValueError):
    pass


class InvariantError(ModelError):
    pass


def _positive(name, value):
    value = float(value)
    if not value > 0 or math.isinf(value):
        raise ModelError('expected positive finite %s, not %r' % (name, value))
    return value


class PhysicalInputs:
    """The physical inputs of the model. Every argument is validated on
    construction.

    Args:
        m (float): mass, positive
        omega (float): frequency, positive
        hbar (float): Planck constant in code units, positive
        theta (float): noncommutativity parameter, non-negative; ``0``
            is the commutative limit
        q (float): deformation parameter, ``0 < q <= 1``
    """
    __slots__ = ('m', 'omega', 'hbar', 'theta', 'q')

    def __init__(self, m=1.0, omega=1.0, hbar=1.0, theta=0.0, q=1.0):
        self.m = _positive('mass', m)
        self.omega = _positive('frequency', omega)
        self.hbar = _positive('hbar', hbar)
        theta = float(theta)
        if not theta >= 0 or math.isinf(theta):
            raise ModelError('expected finite theta >= 0, not %r' % theta)
        self.theta = theta
        self.q = QValue(q)

    def to_dict(self):
        return {'m': self.m, 'omega': self.omega, 'hbar': self.hbar,
                'theta': self.theta, 'q': float(self.q)}

    def replace(self, **kw):
        vals = self.to_dict()
        vals.update(kw)
        return self.__class__(**vals)

    def __eq__(self, other):
        return (isinstance(other, PhysicalInputs)
                and self.to_dict() == other.to_dict())

    def __hash__(self):
        return hash(tuple(self.to_dict().values()))

    def __repr__(self):
        cn = self.__class__.__name__
        kw = ', '.join(f'{k}={v!r}' for k, v in self.to_dict().items())
        return f'{cn}({kw})'


class ModelParams:
    """Derived constants of the model, produced by :func:`derive_params`.
    Instances are immutable by convention and safe to share between
    workers.

    The inputs are reachable through :attr:`inputs`; the common ones are
    mirrored as read-only properties.
    """
    __slots__ = ('inputs', 'lambda1', 'lambda2', 'K1', 'K2', 'Lambda')

    def __init__(self, inputs, lambda1, lambda2, K1, K2):
        self.inputs = inputs
        self.lambda1 = float(lambda1)
        self.lambda2 = float(lambda2)
        self.K1 = float(K1)
        self.K2 = float(K2)
        self.Lambda = self.lambda1 + self.lambda2

    m = property(lambda self: self.inputs.m)
    omega = property(lambda self: self.inputs.omega)
    hbar = property(lambda self: self.inputs.hbar)
    theta = property(lambda self: self.inputs.theta)
    q = property(lambda self: self.inputs.q)

    @property
    def lambda_product(self):
        "``lambda1 * lambda2``, equal to ``(hbar m omega)**2``."
        return self.lambda1 * self.lambda2

    @property
    def unit_regime(self):
        """Whether ``lambda1 * lambda2 >= 1``, the regime in which the
        violation claims for nonzero phases were originally stated."""
        return self.lambda_product >= 1.0

    @property
    def coefficients(self):
        return CanonicalCoefficients.from_params(self)

    def with_q(self, q):
        "Same constants with a different deformation parameter."
        return self.__class__(self.inputs.replace(q=float(q)), self.lambda1,
                              self.lambda2, self.K1, self.K2)

    def to_dict(self):
        ret = self.inputs.to_dict()
        ret.update(lambda1=self.lambda1, lambda2=self.lambda2,
                   K1=self.K1, K2=self.K2, Lambda=self.Lambda)
        return ret

    def __repr__(self):
        return ('%s(lambda1=%r, lambda2=%r, K1=%r, K2=%r, inputs=%r)'
                % (self.__class__.__name__, self.lambda1, self.lambda2,
                   self.K1, self.K2, self.inputs))


def derive_params(inputs):
    """Compute ``lambda1``, ``lambda2``, ``K1`` and ``K2`` from *inputs*.

    ``lambda1 = (m w sqrt(4 hbar^2 + m^2 w^2 theta^2) + m^2 w^2 theta) / 2``
    and ``lambda2`` is its partner with the minus sign, evaluated as
    ``(hbar m w)**2 / lambda1`` so that it keeps full precision when
    theta is large. ``K1 = lambda1 (4 + 2 lambda1 theta / hbar^2)`` and
    ``K2 = lambda2 (4 - 2 lambda2 theta / hbar^2)``.

    Raises :exc:`InvariantError` if a derived constant is not positive.

    >>> p = derive_params(PhysicalInputs(m=2.0, theta=0.5))
    >>> p.lambda1 >= p.lambda2 > 0 and p.K2 > 0
    True
    """
    if not isinstance(inputs, PhysicalInputs):
        inputs = PhysicalInputs(**inputs)
    mw = inputs.m * inputs.omega
    hbar, theta = inputs.hbar, inputs.theta
    mw2_theta = mw * mw * theta
    root = mw * math.sqrt(4 * hbar * hbar + (mw * theta) ** 2)
    lambda1 = 0.5 * (root + mw2_theta)
    lambda2 = (hbar * mw) ** 2 / lambda1
    K1 = lambda1 * (4 + 2 * lambda1 * theta / (hbar * hbar))
    K2 = lambda2 * (4 - 2 * lambda2 * theta / (hbar * hbar))
    for name, val in (('lambda1', lambda1), ('lambda2', lambda2),
                      ('K1', K1), ('K2', K2)):
        if not val > 0 or math.isinf(val):
            raise InvariantError('derived constant %s=%r is not positive for'
                                 ' %r' % (name, val, inputs))
    if lambda2 > lambda1:
        # only reachable through rounding at theta == 0
        lambda2 = lambda1
    return ModelParams(inputs, lambda1, lambda2, K1, K2)


QuadratureMap = namedtuple('QuadratureMap', 'kind mode1 mode2')
QuadratureMap.__doc__ = """\
One canonical operator as ``mode1 * B1 + mode2 * B2`` where ``B_i`` is
``A_i + A_i^dagger`` for kind ``'sum'`` or ``i (A_i - A_i^dagger)`` for
kind ``'diff'``. Both quadratures are Hermitian."""


class CanonicalCoefficients:
    """Coefficients of the ladder-to-canonical map for a set of
    :class:`ModelParams`:

    * ``X1 = -hbar sqrt(K1)/(2 L) (A1 + A1^) + hbar sqrt(K2)/(2 L) (A2 + A2^)``
    * ``X2 = i hbar sqrt(K1)/(2 L) (A1 - A1^) + i hbar sqrt(K2)/(2 L) (A2 - A2^)``
    * ``P1 = i lambda2 sqrt(K1)/(2 L) (A1 - A1^) - i lambda1 sqrt(K2)/(2 L) (A2 - A2^)``
    * ``P2 = lambda2 sqrt(K1)/(2 L) (A1 + A1^) + lambda1 sqrt(K2)/(2 L) (A2 + A2^)``

    with ``L = lambda1 + lambda2``. The inverse map expresses each
    lowering operator through the canonical operators, as
    ``A_i = sum_O inverse[i][O] * O``.

    >>> cc = CanonicalCoefficients.from_params(derive_params(PhysicalInputs()))
    >>> cc.X1
    QuadratureMap(kind='sum', mode1=-0.5, mode2=0.5)
    >>> cc.P1
    QuadratureMap(kind='diff', mode1=0.5, mode2=-0.5)
    """
    __slots__ = ('X1', 'X2', 'P1', 'P2', 'inverse')

    names = ('X1', 'X2', 'P1', 'P2')

    def __init__(self, X1, X2, P1, P2, inverse):
        self.X1, self.X2, self.P1, self.P2 = X1, X2, P1, P2
        self.inverse = inverse

    @classmethod
    def from_params(cls, params):
        hbar, l1, l2 = params.hbar, params.lambda1, params.lambda2
        r1, r2 = math.sqrt(params.K1), math.sqrt(params.K2)
        c = 1.0 / (2 * params.Lambda)
        X1 = QuadratureMap('sum', -hbar * r1 * c, hbar * r2 * c)
        X2 = QuadratureMap('diff', hbar * r1 * c, hbar * r2 * c)
        P1 = QuadratureMap('diff', l2 * r1 * c, -l1 * r2 * c)
        P2 = QuadratureMap('sum', l2 * r1 * c, l1 * r2 * c)
        inverse = {1: {'X1': -l1 / hbar / r1, 'P1': -1j / r1,
                       'X2': -1j * l1 / hbar / r1, 'P2': 1.0 / r1},
                   2: {'X1': l2 / hbar / r2, 'P1': 1j / r2,
                       'X2': -1j * l2 / hbar / r2, 'P2': 1.0 / r2}}
        return cls(X1, X2, P1, P2, inverse)

    def __getitem__(self, name):
        if name not in self.names:
            raise KeyError(name)
        return getattr(self, name)

    def items(self):
        return [(name, getattr(self, name)) for name in self.names]

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__,
                           ', '.join(f'{n}={q!r}' for n, q in self.items()))
