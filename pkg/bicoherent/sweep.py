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
"""Grid sweeps over labels and model parameters.

A sweep walks the Cartesian product of the grids of a
:class:`~bicoherent.cli.SweepConfig` in a fixed nested order (``q``,
``theta``, ``J1``, ``J2``, ``gamma1``, ``gamma2``, ``t``) and evaluates
one record per point: the variances, the four commutator bounds, the
six uncertainty reports and the feasibility conditions. Points whose
actions lie outside the convergence radius for their ``q`` are logged
and skipped.

Points are independent, so they can be farmed out to a process pool;
records are gathered and sorted by grid index before anything is
written, which keeps the output byte-identical for identical input.

>>> format_float(0.1)
'1.0000000000000001e-01'
>>> format_float(float('inf'))
'inf'
"""

import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from boltons.excutils import ExceptionCauseMixin
from boltons.fileutils import atomic_save
from boltons.iterutils import chunked, remap
from boltons.namedutils import namedtuple
from boltons.statsutils import Stats
from boltons.tableutils import Table

from .model import PhysicalInputs, derive_params
from .qmath import DomainError, QValue
from .series import g_bundle
from .states import CoherentLabel, evolve
from .uncertainty import (NONTRIVIAL_PAIRS, PAIRS, commutator_rhs,
                          feasibility_conditions, reports_from_moments,
                          variances_closed_form)


__all__ = ['PointError', 'GridPoint', 'SweepResult', 'CSV_HEADER',
           'EVOLVE_HEADER', 'iter_grid', 'run_point', 'run_sweep',
           'evolve_rows', 'format_float', 'write_rows', 'write_evolution',
           'summarize', 'write_summary', 'write_json', 'to_json']


log = logging.getLogger(__name__)

CSV_HEADER = ('q', 'theta', 'm', 'omega', 'hbar', 'J1', 'J2', 'gamma1',
              'gamma2', 't', 'chi1', 'chi2', 'kappa1', 'kappa2', 'rhs_x1x2',
              'rhs_x1p1', 'rhs_x2p2', 'rhs_p1p2', 'ratio_x1x2', 'ratio_x1p1',
              'ratio_x2p2', 'ratio_p1p2', 'p1', 'p2', 'p3', 'p4', 'min_ratio',
              'violated')
EVOLVE_HEADER = (('t', 'gamma1', 'gamma2', 'chi1', 'chi2', 'kappa1', 'kappa2')
                 + tuple('lhs_' + p.lower() for p in PAIRS)
                 + tuple('ratio_' + p.lower() for p in NONTRIVIAL_PAIRS))
CHUNK_SIZE = 64


class PointError(ExceptionCauseMixin, RuntimeError):
    """Wraps the failure of one grid point; the original exception is
    kept as :attr:`cause`."""
    pass


GridPoint = namedtuple('GridPoint', 'index q theta J1 J2 gamma1 gamma2 t')
SweepResult = namedtuple('SweepResult', 'records skipped failed')


def iter_grid(config):
    """Yield a :class:`GridPoint` for every combination of the grids of
    *config*, numbered in iteration order."""
    index = 0
    for q in config.q_grid:
        for theta in config.theta_grid:
            for J1 in config.J1_grid:
                for J2 in config.J2_grid:
                    for g1 in config.gamma1_grid:
                        for g2 in config.gamma2_grid:
                            for t in config.t_grid:
                                yield GridPoint(index, q, theta, J1, J2,
                                                g1, g2, t)
                                index += 1


def _settings(config):
    # a plain, picklable subset of the config for worker processes
    cutoff = config.cutoff if isinstance(config.cutoff, int) else None
    return {'m': config.m, 'omega': config.omega, 'hbar': config.hbar,
            'convention': config.convention, 'tol': config.tol,
            'series_tol': config.series_tol, 'cutoff': cutoff}


def _point_record(label, params, q, t, settings):
    gb = g_bundle(label, q, settings['convention'], settings['series_tol'],
                  cutoff=settings['cutoff'])
    variances = variances_closed_form(label, params, q, gb)
    rhs = commutator_rhs(label, params, q)
    reports = reports_from_moments(variances, rhs, settings['tol'])
    feas = feasibility_conditions(label, params, q, gb)
    rec = {'q': float(q), 'theta': params.theta, 'm': params.m,
           'omega': params.omega, 'hbar': params.hbar,
           'J1': label.J1, 'J2': label.J2, 'gamma1': label.gamma1,
           'gamma2': label.gamma2, 't': float(t)}
    rec.update(variances._asdict())
    by_pair = {r.pair: r for r in reports}
    for pair in NONTRIVIAL_PAIRS:
        rec['rhs_' + pair.lower()] = getattr(rhs, pair)
    for pair in NONTRIVIAL_PAIRS:
        rec['ratio_' + pair.lower()] = by_pair[pair].ratio
    rec.update(p1=feas.p1, p2=feas.p2, p3=feas.p3, p4=feas.p4)
    rec['min_ratio'] = min(r.ratio for r in reports)
    rec['violated'] = not all(r.satisfied for r in reports)
    rec['saturated'] = [r.pair for r in reports if r.saturated]
    rec['unit_regime'] = params.unit_regime
    rec['reports'] = [r._asdict() for r in reports]
    for pair in PAIRS:
        rec['lhs_' + pair.lower()] = by_pair[pair].lhs
    return rec


def run_point(point, settings):
    """Evaluate one :class:`GridPoint`. The label is evolved to time
    ``point.t`` first, so the recorded phases are
    ``gamma_i + lambda_i t / m``.

    Raises :exc:`~bicoherent.qmath.DomainError` for labels outside the
    convergence radius and :exc:`PointError`, chained to its cause, for
    anything that fails once the label is known to be in range. That
    includes a fixed series cutoff too short for ``series_tol``.
    """
    q = QValue(point.q)
    label = CoherentLabel(point.J1, point.gamma1, point.J2, point.gamma2)
    label.check_domain(q)
    try:
        params = derive_params(PhysicalInputs(
            m=settings['m'], omega=settings['omega'], hbar=settings['hbar'],
            theta=point.theta, q=q))
        label = evolve(label, point.t, params)
        rec = _point_record(label, params, q, point.t, settings)
    except Exception as e:
        raise PointError(e, 'grid point %d failed: %r' % (point.index, e))
    rec['index'] = point.index
    return rec


def _run_chunk(points, settings):
    # worker entry point; exceptions are turned into outcomes so one bad
    # point cannot take down the pool
    ret = []
    for point in points:
        try:
            ret.append((point.index, run_point(point, settings), None, None))
        except DomainError as e:
            ret.append((point.index, None, 'skipped', str(e)))
        except PointError as e:
            ret.append((point.index, None, 'failed', str(e)))
    return ret


def run_sweep(config):
    """Evaluate every grid point of *config*, with ``config.workers``
    processes when it is larger than one.

    Returns:
        SweepResult: the records sorted by grid index, and the numbers
        of skipped (out of domain) and failed points
    """
    settings = _settings(config)
    points = list(iter_grid(config))
    workers = max(int(config.workers), 1)
    log.info('sweeping %d grid points with %d worker(s)', len(points), workers)
    if workers == 1:
        outcomes = _run_chunk(points, settings)
    else:
        outcomes = []
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_chunk, chunk, settings)
                       for chunk in chunked(points, CHUNK_SIZE)]
            for future in futures:
                outcomes.extend(future.result())
    outcomes.sort(key=lambda o: o[0])
    records, skipped, failed = [], 0, 0
    for index, rec, kind, reason in outcomes:
        if rec is not None:
            records.append(rec)
        elif kind == 'skipped':
            skipped += 1
            log.warning('skipping grid point %d: %s', index, reason)
        else:
            failed += 1
            log.error('%s', reason)
    return SweepResult(records, skipped, failed)


def evolve_rows(label, params, t_grid, q=None, convention='spectral-gap',
                tol=1e-9, series_tol=1e-15):
    """Uncertainty data along the trajectory ``gamma_i(t) = gamma_i +
    lambda_i t / m``, one dict per time in *t_grid* with the keys of
    :data:`EVOLVE_HEADER`."""
    q = params.q if q is None else QValue(q)
    settings = {'convention': convention, 'tol': tol,
                'series_tol': series_tol, 'cutoff': None}
    ret = []
    for t in t_grid:
        rec = _point_record(evolve(label, t, params), params, q, t, settings)
        ret.append({key: rec[key] for key in EVOLVE_HEADER})
    return ret


def format_float(value):
    "Format a float with 17 significant digits in lowercase scientific notation."
    value = float(value)
    if math.isinf(value) or math.isnan(value):
        return repr(value)
    return '%.16e' % value


def _format_cell(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return format_float(value)


def _open_output(path):
    if path is None or path == '-':
        return _StdoutSink()
    return atomic_save(path, text_mode=True)


class _StdoutSink:
    def __enter__(self):
        self.buf = io.StringIO()
        return self.buf

    def __exit__(self, exc_type, exc_value, tb):
        if exc_type is None:
            sys.stdout.write(self.buf.getvalue())
            sys.stdout.flush()
        return False


def _finite_visit(path, key, value):
    if isinstance(value, float) and not math.isfinite(value):
        return key, format_float(value)
    return key, value


def to_json(data, **kw):
    """Serialize *data* to strict JSON. Infinite and NaN floats, such as
    the ratio of a pair whose bound vanishes, become the strings
    ``'inf'``, ``'-inf'`` and ``'nan'``, as in the CSV output.

    >>> to_json({'ratio': float('inf'), 'rhs': [0.0]})
    '{"ratio": "inf", "rhs": [0.0]}'
    """
    return json.dumps(remap(data, visit=_finite_visit), allow_nan=False, **kw)


def write_rows(records, path, format='csv', header=CSV_HEADER):
    """Write *records* to *path* (``'-'`` or ``None`` for stdout).

    ``'csv'`` writes the columns of *header* in order; ``'json'`` writes
    one JSON object per line with every key of the record.
    """
    with _open_output(path) as f:
        if format == 'csv':
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for rec in records:
                writer.writerow([_format_cell(rec[key]) for key in header])
        elif format == 'json':
            for rec in records:
                f.write(to_json(rec, sort_keys=True) + '\n')
        else:
            raise ValueError('unknown output format: %r' % (format,))
    return path


def write_evolution(rows, path, format='csv'):
    """Write time-series rows from :func:`evolve_rows`: a wide CSV, or a
    JSON mapping of each quantity to its ``[[t, value], ...]`` series."""
    if format == 'csv':
        return write_rows(rows, path, 'csv', header=EVOLVE_HEADER)
    elif format != 'json':
        raise ValueError('unknown output format: %r' % (format,))
    series = {key: [[row['t'], row[key]] for row in rows]
              for key in EVOLVE_HEADER[1:]}
    return write_json(series, path)


def _coords(rec):
    return {key: rec[key] for key in CSV_HEADER[:10]}


def summarize(result, saturation_pairs=('X1P1', 'X2P2')):
    """Summary of a :class:`SweepResult`: counts, the points where the
    position-momentum relations are saturated, every violation witness,
    violation counts split by the regime ``lambda1 lambda2 >= 1``, and
    descriptive statistics of the minimum ratio."""
    records = result.records
    saturation_points, witnesses = [], []
    by_regime = {'unit': 0, 'sub_unit': 0}
    for rec in records:
        pairs = [p for p in rec['saturated'] if p in saturation_pairs]
        if pairs:
            saturation_points.append(dict(_coords(rec), pairs=pairs))
        bad = [r for r in rec['reports'] if not r['satisfied']]
        if bad:
            by_regime['unit' if rec['unit_regime'] else 'sub_unit'] += 1
        for rep in bad:
            witnesses.append(dict(_coords(rec), pair=rep['pair'],
                                  ratio=rep['ratio'], lhs=rep['lhs'],
                                  rhs=rep['rhs']))
    min_ratios = [rec['min_ratio'] for rec in records]
    ret = {'points': len(records) + result.skipped + result.failed,
           'evaluated': len(records),
           'skipped': result.skipped,
           'failed': result.failed,
           'saturation_points': saturation_points,
           'violation_witnesses': witnesses,
           'violations_by_regime': by_regime}
    if min_ratios:
        desc = Stats(min_ratios).describe(format='dict')
        ret['min_ratio'] = {str(k): v for k, v in desc.items()}
    table = Table.from_data([[ret['points'], ret['evaluated'], ret['skipped'],
                              ret['failed'], len(saturation_points),
                              len(witnesses)]],
                            headers=['points', 'evaluated', 'skipped',
                                     'failed', 'saturated', 'witnesses'])
    log.info('sweep summary:\n%s', table.to_text())
    return ret


def write_summary(summary, path):
    """Write *summary* next to *path* as ``<path>.summary.json``, or to
    stdout when the records went there."""
    if path is None or path == '-':
        target = None
    else:
        target = str(path) + '.summary.json'
    write_json(summary, target)
    return target


def write_json(data, path):
    "Write *data* as one indented JSON document to *path*, or to stdout."
    with _open_output(path) as f:
        f.write(to_json(data, sort_keys=True, indent=2) + '\n')
    return path
