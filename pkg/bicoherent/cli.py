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
"""Command-line driver.

::

    bicoherent verify [--config FILE] [--cutoff N|auto] [--out FILE]
    bicoherent sweep  [--config FILE] [--format csv|json] [--workers N] [--out FILE]
    bicoherent evolve [--config FILE] [--label J1 GAMMA1 J2 GAMMA2] [--out FILE]

A configuration file is a JSON object with the keys of
:data:`DEFAULTS`; every key is optional and every flag overrides the
matching key. A grid is a list of numbers, a single number, or a
linspace ``{"start": a, "stop": b, "num": n}``:

>>> cfg = SweepConfig(gamma1_grid={'start': 0, 'stop': 1, 'num': 3})
>>> cfg.gamma1_grid
[0.0, 0.5, 1.0]

Exit codes are ``0`` on success, ``1`` when a verification suite fails
or a sweep produces no records, and ``2`` for configuration errors,
including actions outside the convergence radius in ``verify`` and
``evolve``. Logging goes to stderr; ``-v`` and ``-vv`` raise it to
INFO and DEBUG.
"""

import argparse
import json
import logging
import math
import sys

import numpy as np

from .fock import (build_basis, canonical_matrices, deformed_algebra_residual,
                   ladder_from_canonical, ladder_matrices,
                   verify_dynamical_commutators)
from .model import ModelError, PhysicalInputs, derive_params
from .oracle import convention_evidence, crosscheck
from .qmath import DomainError, QValue
from .series import CONVENTIONS
from .states import (AUTO, CoherentLabel, StateError,
                     action_identity_check, build_coherent_vector, evolve,
                     evolve_vector, glauber_vector)
from .sweep import (evolve_rows, run_sweep, summarize, write_evolution,
                    write_json, write_rows, write_summary)


__all__ = ['ConfigError', 'SweepConfig', 'DEFAULTS', 'load_config',
           'cmd_verify', 'cmd_sweep', 'cmd_evolve', 'main']


log = logging.getLogger(__name__)

GRID_KEYS = ('q_grid', 'theta_grid', 'J1_grid', 'J2_grid', 'gamma1_grid',
             'gamma2_grid', 't_grid')
DEFAULTS = {'q_grid': [1.0], 'theta_grid': [0.0], 'J1_grid': [0.5],
            'J2_grid': [0.5], 'gamma1_grid': [0.0], 'gamma2_grid': [0.0],
            't_grid': [0.0], 'm': 1.0, 'omega': 1.0, 'hbar': 1.0,
            'cutoff': 'auto', 'max_cutoff': 48, 'convention': 'spectral-gap',
            'tol': 1e-9, 'series_tol': 1e-15, 'residual_tol': 1e-12,
            'output_path': None, 'format': 'csv', 'workers': 1}
FORMATS = ('csv', 'json')
VERIFY_CUTOFF = 16
STATE_CHECK_TOL = 1e-10

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


def _parse_grid(key, value):
    if isinstance(value, dict):
        unknown = set(value) - {'start', 'stop', 'num'}
        if unknown or len(value) != 3:
            raise ConfigError('%s: expected keys start, stop and num, not %r'
                              % (key, sorted(value)))
        num = value['num']
        if not isinstance(num, int) or num < 1:
            raise ConfigError('%s: expected a positive integer num, not %r'
                              % (key, num))
        value = np.linspace(float(value['start']), float(value['stop']),
                            num).tolist()
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    try:
        ret = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError('%s: expected a list of numbers, not %r'
                          % (key, value))
    if not ret:
        raise ConfigError('%s: grid is empty' % key)
    if not all(math.isfinite(v) for v in ret):
        raise ConfigError('%s: grid values must be finite' % key)
    return ret


def _parse_cutoff(value):
    if value is AUTO or value == 'auto':
        return AUTO
    try:
        ret = int(value)
    except (TypeError, ValueError):
        raise ConfigError('cutoff: expected an integer or "auto", not %r'
                          % (value,))
    if ret < 2 or ret != value and not isinstance(value, str):
        raise ConfigError('cutoff: expected an integer >= 2, not %r'
                          % (value,))
    return ret


class SweepConfig:
    """Validated run configuration. Construct with keyword arguments
    named as in :data:`DEFAULTS`; unknown keys and invalid values raise
    :exc:`ConfigError`.
    """
    __slots__ = tuple(DEFAULTS)

    def __init__(self, **kw):
        unknown = set(kw) - set(DEFAULTS)
        if unknown:
            raise ConfigError('unknown configuration keys: %s'
                              % ', '.join(sorted(unknown)))
        vals = dict(DEFAULTS, **kw)
        for key in GRID_KEYS:
            setattr(self, key, _parse_grid(key, vals[key]))
        for q in self.q_grid:
            if not 0 < q <= 1:
                raise ConfigError('q_grid: expected 0 < q <= 1, not %r' % q)
        if min(self.theta_grid) < 0:
            raise ConfigError('theta_grid: expected theta >= 0')
        if min(self.J1_grid + self.J2_grid) < 0:
            raise ConfigError('J grids: expected J >= 0')
        for key in ('m', 'omega', 'hbar', 'tol', 'series_tol', 'residual_tol'):
            val = self._number(key, vals[key])
            if not val > 0:
                raise ConfigError('%s: expected a positive number, not %r'
                                  % (key, val))
            setattr(self, key, val)
        self.cutoff = _parse_cutoff(vals['cutoff'])
        for key in ('max_cutoff', 'workers'):
            val = vals[key]
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                raise ConfigError('%s: expected a positive integer, not %r'
                                  % (key, val))
            setattr(self, key, val)
        if self.max_cutoff < 2:
            raise ConfigError('max_cutoff: expected at least 2')
        if vals['convention'] not in CONVENTIONS:
            raise ConfigError('convention: expected one of %s, not %r'
                              % (', '.join(CONVENTIONS), vals['convention']))
        self.convention = vals['convention']
        if vals['format'] not in FORMATS:
            raise ConfigError('format: expected csv or json, not %r'
                              % (vals['format'],))
        self.format = vals['format']
        path = vals['output_path']
        self.output_path = None if path is None else str(path)

    @staticmethod
    def _number(key, value):
        if isinstance(value, bool):
            raise ConfigError('%s: expected a number, not %r' % (key, value))
        try:
            ret = float(value)
        except (TypeError, ValueError):
            raise ConfigError('%s: expected a number, not %r' % (key, value))
        if not math.isfinite(ret):
            raise ConfigError('%s: expected a finite number' % key)
        return ret

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError('cannot read config %r: %s' % (path, e))
        except ValueError as e:
            raise ConfigError('config %r is not valid JSON: %s' % (path, e))
        if not isinstance(data, dict):
            raise ConfigError('config %r must hold a JSON object' % (path,))
        return cls(**data)

    def to_dict(self):
        ret = {key: getattr(self, key) for key in self.__slots__}
        if ret['cutoff'] is AUTO:
            ret['cutoff'] = 'auto'
        return ret

    def replace(self, **kw):
        vals = self.to_dict()
        vals.update(kw)
        return self.__class__(**vals)

    def params(self, q, theta):
        return derive_params(PhysicalInputs(m=self.m, omega=self.omega,
                                            hbar=self.hbar, theta=theta, q=q))

    def labels(self):
        "Every label of the J and gamma grids, in grid order."
        return [CoherentLabel(J1, g1, J2, g2)
                for J1 in self.J1_grid for J2 in self.J2_grid
                for g1 in self.gamma1_grid for g2 in self.gamma2_grid]

    def check_domain(self):
        "Raise :exc:`~bicoherent.qmath.DomainError` if any ``(q, J)`` leaves the radius."
        for q in self.q_grid:
            for label in self.labels():
                label.check_domain(q)

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, ', '.join(
            '%s=%r' % item for item in self.to_dict().items()))


_FLAG_KEYS = {'out': 'output_path', 'format': 'format', 'cutoff': 'cutoff',
              'convention': 'convention', 'tol': 'tol', 'workers': 'workers'}


def load_config(args):
    "Build a :class:`SweepConfig` from the parsed command line *args*."
    if args.config:
        config = SweepConfig.from_file(args.config)
    else:
        config = SweepConfig()
    overrides = {key: getattr(args, flag) for flag, key in _FLAG_KEYS.items()
                 if getattr(args, flag, None) is not None}
    if overrides:
        config = config.replace(**overrides)
    return config


class _Suite:
    __slots__ = ('name', 'tolerance', 'checks', 'max_residual', 'failures')

    def __init__(self, name, tolerance):
        self.name = name
        self.tolerance = tolerance
        self.checks = 0
        self.max_residual = 0.0
        self.failures = []

    def record(self, what, residual, tolerance=None):
        tolerance = self.tolerance if tolerance is None else tolerance
        residual = float(residual)
        self.checks += 1
        self.max_residual = max(self.max_residual, residual)
        if not residual <= tolerance:
            self.failures.append({'check': what, 'residual': residual,
                                  'tolerance': tolerance})
            log.warning('%s: %s residual %.3e exceeds %.1e',
                        self.name, what, residual, tolerance)

    def to_dict(self):
        return {'passed': not self.failures, 'checks': self.checks,
                'tolerance': self.tolerance,
                'max_residual': self.max_residual,
                'failures': self.failures}


def _verify_operators(config, suites):
    N = VERIFY_CUTOFF if config.cutoff is AUTO else config.cutoff
    basis = build_basis(N)
    inner = basis.interior_indices()
    for q in config.q_grid:
        ladders = ladder_matrices(basis, q)
        suites['algebra'].record('q=%r' % q, deformed_algebra_residual(
            ladders, q, basis))
        for theta in config.theta_grid:
            params = config.params(q, theta)
            where = 'q=%r theta=%r' % (q, theta)
            for tag, resid in verify_dynamical_commutators(params, basis).items():
                suites['commutators'].record('%s %s' % (where, tag), resid)
            canonical = canonical_matrices(params, ladders)
            A1, A2 = ladder_from_canonical(params, canonical)
            resid = max((A1 - ladders.A1).max_abs(inner),
                        (A2 - ladders.A2).max_abs(inner))
            suites['inverse_map'].record(where, resid)


def _verify_states(config, suites, evidence):
    for q in config.q_grid:
        for theta in config.theta_grid:
            params = config.params(q, theta)
            where = 'q=%r theta=%r' % (q, theta)
            for i, label in enumerate(config.labels()):
                at = '%s %r' % (where, label)
                reports = crosscheck(label, params, tol=config.tol,
                                     convention=config.convention,
                                     max_cutoff=config.max_cutoff,
                                     series_tol=config.series_tol)
                for rep in reports:
                    suites['crosscheck'].record('%s %s' % (at, rep.quantity),
                                                rep.abs_diff)
                state = build_coherent_vector(label, q,
                                              max_cutoff=config.max_cutoff)
                energy = (params.lambda1 * label.J1
                          + params.lambda2 * label.J2) / params.m
                dev = action_identity_check(label, params, q,
                                            max_cutoff=config.max_cutoff)
                suites['limits'].record('%s action' % at, abs(dev),
                                        STATE_CHECK_TOL * max(1.0, energy))
                for t in config.t_grid:
                    moved = evolve_vector(state, t, params)
                    target = build_coherent_vector(evolve(label, t, params),
                                                   q, basis=state.basis,
                                                   tol=1.0)
                    suites['limits'].record('%s t=%r evolution' % (at, t),
                                            moved.distance(target))
                if QValue(q).is_undeformed:
                    z = [math.sqrt(J) * complex(math.cos(g), -math.sin(g))
                         for J, g in ((label.J1, label.gamma1),
                                      (label.J2, label.gamma2))]
                    overlap = abs(glauber_vector(z[0], z[1], state.basis)
                                  .overlap(state))
                    suites['limits'].record('%s glauber' % at, 1 - overlap)
                if i == 0:
                    ev = convention_evidence(label, params,
                                             tol=config.tol,
                                             max_cutoff=config.max_cutoff)
                    evidence.append(dict(q=q, theta=theta,
                                         label=label.to_dict(), **ev))


def cmd_verify(config):
    """Run the verification suites and write a JSON summary. Returns
    the exit code: ``0`` if every asserted check passes, ``1`` otherwise.

    The operator suites use ``config.cutoff`` levels per mode (16 when
    it is ``auto``); the state suites size their bases automatically.
    The cross-check compares the matrices with the series of
    ``config.convention``, so it only passes for ``'spectral-gap'``
    away from zero phases; ``convention_evidence`` reports both.
    """
    config.check_domain()
    suites = {'algebra': _Suite('algebra', config.residual_tol),
              'commutators': _Suite('commutators', 10 * config.residual_tol),
              'inverse_map': _Suite('inverse_map', config.residual_tol),
              'crosscheck': _Suite('crosscheck', config.tol),
              'limits': _Suite('limits', STATE_CHECK_TOL)}
    evidence = []
    _verify_operators(config, suites)
    _verify_states(config, suites, evidence)
    summary = {'passed': all(not s.failures for s in suites.values()),
               'suites': {name: s.to_dict() for name, s in suites.items()},
               'convention_evidence': evidence,
               'config': config.to_dict()}
    write_json(summary, config.output_path)
    if summary['passed']:
        log.info('all verification suites passed')
        return EXIT_OK
    log.error('verification failed: %s', ', '.join(
        name for name, s in suites.items() if s.failures))
    return EXIT_FAILED


def cmd_sweep(config):
    """Evaluate the grid, write the records and the companion summary.
    Returns ``1`` only if no grid point could be evaluated."""
    result = run_sweep(config)
    write_rows(result.records, config.output_path, config.format)
    write_summary(summarize(result), config.output_path)
    if not result.records:
        log.error('no grid point could be evaluated (%d skipped, %d failed)',
                  result.skipped, result.failed)
        return EXIT_FAILED
    return EXIT_OK


def cmd_evolve(config, label=None, t_grid=None):
    """Write the uncertainty data of *label* along its trajectory for
    the first ``q`` and ``theta`` of *config*. Without a label, the first
    entry of each J and gamma grid is used; without *t_grid*, the
    configured one."""
    if label is None:
        label = config.labels()[0]
    if t_grid is None:
        t_grid = config.t_grid
    q, theta = config.q_grid[0], config.theta_grid[0]
    label.check_domain(q)
    params = config.params(q, theta)
    rows = evolve_rows(label, params, t_grid, q, config.convention,
                       config.tol, config.series_tol)
    write_evolution(rows, config.output_path, config.format)
    return EXIT_OK


def _cutoff_arg(text):
    if text == 'auto':
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer or "auto"')


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON configuration file')
    common.add_argument('--out', help='output path (default: stdout)')
    common.add_argument('--format', choices=FORMATS)
    common.add_argument('--cutoff', type=_cutoff_arg,
                        help='levels per mode, or "auto"')
    common.add_argument('--convention', choices=CONVENTIONS)
    common.add_argument('--tol', type=float)
    common.add_argument('--workers', type=int)
    common.add_argument('-v', '--verbose', action='count', default=0)

    parser = argparse.ArgumentParser(
        prog='bicoherent',
        description='Uncertainty relations of deformed two-mode coherent'
        ' states.')
    subs = parser.add_subparsers(dest='command', metavar='command')
    subs.required = True
    subs.add_parser('verify', parents=[common],
                    help='run the verification suites; the cross-check'
                    ' uses --convention')
    subs.add_parser('sweep', parents=[common],
                    help='evaluate the configured parameter grid')
    evo = subs.add_parser('evolve', parents=[common],
                          help='follow one label in time')
    evo.add_argument('--label', nargs=4, type=float,
                     metavar=('J1', 'GAMMA1', 'J2', 'GAMMA2'))
    evo.add_argument('--times', nargs='+', type=float,
                     help='times to evaluate (default: the t grid)')
    return parser


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = load_config(args)
        if args.command == 'verify':
            return cmd_verify(config)
        elif args.command == 'sweep':
            return cmd_sweep(config)
        label = None if args.label is None else CoherentLabel(*args.label)
        return cmd_evolve(config, label, args.times)
    except (ConfigError, DomainError, ModelError, StateError) as e:
        log.error('%s: %s', e.__class__.__name__, e)
        return EXIT_CONFIG
