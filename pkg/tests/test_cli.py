import csv
import json
import math
import os

import pytest
from pytest import raises

from bicoherent.cli import ConfigError, SweepConfig, main
from bicoherent.model import PhysicalInputs, derive_params
from bicoherent.states import AUTO, CoherentLabel, evolve
from bicoherent.sweep import CSV_HEADER, EVOLVE_HEADER, format_float, to_json
from bicoherent.uncertainty import gur_report, variances_closed_form


VIOLATION_SCAN_CONFIG = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'misc', 'violation_scan.json')


def _write_config(tmp_path, **kw):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(kw))
    return str(path)


def _read_csv(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def _strict_loads(text):
    def reject(token):
        raise ValueError('non-standard JSON token %r' % token)
    return json.loads(text, parse_constant=reject)


def test_config_defaults():
    cfg = SweepConfig()
    assert cfg.q_grid == [1.0]
    assert cfg.cutoff is AUTO
    assert cfg.convention == 'spectral-gap'
    assert cfg.to_dict()['cutoff'] == 'auto'
    assert cfg.replace(cutoff=16).cutoff == 16


def test_config_grids():
    cfg = SweepConfig(q_grid=0.5, t_grid={'start': 0, 'stop': 2, 'num': 5})
    assert cfg.q_grid == [0.5]
    assert cfg.t_grid == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert len(cfg.replace(J1_grid=[0.1, 0.2]).labels()) == 2


@pytest.mark.parametrize('kw', [{'q_grid': [0.0]}, {'q_grid': [1.2]},
                                {'theta_grid': [-1]}, {'J1_grid': [-0.5]},
                                {'J2_grid': []}, {'gamma1_grid': ['x']},
                                {'t_grid': {'start': 0, 'num': 3}},
                                {'cutoff': 1}, {'cutoff': 'big'},
                                {'workers': 0}, {'tol': -1.0},
                                {'convention': 'textbook'},
                                {'format': 'xml'}, {'colour': 'blue'}])
def test_config_errors(kw):
    with raises(ConfigError):
        SweepConfig(**kw)


def test_config_file_errors(tmp_path):
    with raises(ConfigError):
        SweepConfig.from_file(str(tmp_path / 'missing.json'))
    bad = tmp_path / 'bad.json'
    bad.write_text('{not json')
    with raises(ConfigError):
        SweepConfig.from_file(str(bad))
    listed = tmp_path / 'list.json'
    listed.write_text('[1, 2]')
    with raises(ConfigError):
        SweepConfig.from_file(str(listed))


def test_verify_default(tmp_path):
    out = str(tmp_path / 'verify.json')
    assert main(['verify', '--out', out]) == 0
    with open(out) as f:
        summary = json.load(f)
    assert summary['passed']
    assert set(summary['suites']) == {'algebra', 'commutators', 'inverse_map',
                                      'crosscheck', 'limits'}
    evidence = summary['convention_evidence'][0]
    assert evidence['spectral-gap'] < 1e-9


def test_verify_deformed_with_fixed_cutoff(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], theta_grid=[0.3],
                           gamma1_grid=[2.0], t_grid=[0.0, 1.0])
    out = str(tmp_path / 'verify.json')
    assert main(['verify', '--config', config, '--cutoff', '16',
                 '--out', out]) == 0
    with open(out) as f:
        summary = json.load(f)
    assert summary['config']['cutoff'] == 16
    evidence = summary['convention_evidence'][0]
    assert evidence['paper-literal'] > evidence['spectral-gap']


def test_verify_outside_radius(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], J1_grid=[2.0])
    assert main(['verify', '--config', config,
                 '--out', str(tmp_path / 'v.json')]) == 2


def test_bad_config_exit_code(tmp_path):
    config = _write_config(tmp_path, q_grid=[3.0])
    assert main(['sweep', '--config', config]) == 2


def test_sweep_csv(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5, 0.9], J1_grid=[0.1, 0.5],
                           J2_grid=[0.3])
    out = str(tmp_path / 'sweep.csv')
    assert main(['sweep', '--config', config, '--out', out]) == 0
    with open(out) as f:
        assert f.readline().strip() == ','.join(CSV_HEADER)
    rows = _read_csv(out)
    assert len(rows) == 4
    for row in rows:
        assert row['violated'] == 'false'
        for key in ('ratio_x1p1', 'ratio_x2p2'):
            assert abs(float(row[key]) - 1) < 1e-10
    with open(out + '.summary.json') as f:
        summary = json.load(f)
    assert summary['evaluated'] == 4
    assert len(summary['saturation_points']) == 4
    assert summary['violation_witnesses'] == []


def test_sweep_is_deterministic(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.7], theta_grid=[0.0, 0.4],
                           gamma1_grid=[-1.0, 2.0], J2_grid=[0.2])
    first, second = str(tmp_path / 'a.csv'), str(tmp_path / 'b.csv')
    assert main(['sweep', '--config', config, '--out', first]) == 0
    assert main(['sweep', '--config', config, '--out', second]) == 0
    with open(first) as a, open(second) as b:
        assert a.read() == b.read()


def test_sweep_workers_match_serial(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.6, 1.0], theta_grid=[0.2],
                           gamma1_grid=[0.0, 1.0, 2.0], J1_grid=[0.3])
    serial, pooled = str(tmp_path / 's.csv'), str(tmp_path / 'p.csv')
    assert main(['sweep', '--config', config, '--out', serial]) == 0
    assert main(['sweep', '--config', config, '--workers', '2',
                 '--out', pooled]) == 0
    with open(serial) as a, open(pooled) as b:
        assert a.read() == b.read()


def test_sweep_time_grid(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.6], theta_grid=[0.5],
                           gamma1_grid=[0.2], gamma2_grid=[-0.1],
                           t_grid=[0.0, 1.5])
    out = str(tmp_path / 'sweep.csv')
    assert main(['sweep', '--config', config, '--out', out]) == 0
    rows = _read_csv(out)
    params = derive_params(PhysicalInputs(q=0.6, theta=0.5))
    moved = evolve(CoherentLabel(0.5, 0.2, 0.5, -0.1), 1.5, params)
    assert float(rows[1]['t']) == 1.5
    assert float(rows[1]['gamma1']) == moved.gamma1
    assert float(rows[1]['gamma2']) == moved.gamma2


def test_sweep_skips_points_outside_radius(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], J1_grid=[0.5, 2.0])
    out = str(tmp_path / 'sweep.csv')
    assert main(['sweep', '--config', config, '--out', out]) == 0
    assert len(_read_csv(out)) == 1
    with open(out + '.summary.json') as f:
        summary = json.load(f)
    assert (summary['points'], summary['skipped']) == (2, 1)


def test_sweep_with_nothing_to_evaluate(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], J1_grid=[2.0])
    assert main(['sweep', '--config', config,
                 '--out', str(tmp_path / 's.csv')]) == 1


def test_sweep_json(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.8], theta_grid=[0.3])
    out = str(tmp_path / 'sweep.jsonl')
    assert main(['sweep', '--config', config, '--format', 'json',
                 '--out', out]) == 0
    with open(out) as f:
        records = [json.loads(line) for line in f]
    assert len(records) == 1
    assert set(CSV_HEADER) <= set(records[0])
    assert [r['pair'] for r in records[0]['reports']][:2] == ['X1X2', 'X1P1']


def test_evolve_constant_ratio_at_q_one(tmp_path):
    out = str(tmp_path / 'evolve.csv')
    assert main(['evolve', '--label', '0.5', '0', '0.5', '0',
                 '--times', '0', '1', '2', '--out', out]) == 0
    rows = _read_csv(out)
    assert list(rows[0]) == list(EVOLVE_HEADER)
    assert [float(r['t']) for r in rows] == [0.0, 1.0, 2.0]
    for row in rows:
        assert abs(float(row['ratio_x1p1']) - 1) < 1e-10


def test_evolve_first_row_matches_label(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], theta_grid=[0.2])
    out = str(tmp_path / 'evolve.csv')
    assert main(['evolve', '--config', config, '--label', '0.4', '0.7',
                 '0.2', '-0.3', '--times', '0', '1', '--out', out]) == 0
    rows = _read_csv(out)
    params = derive_params(PhysicalInputs(q=0.5, theta=0.2))
    label = CoherentLabel(0.4, 0.7, 0.2, -0.3)
    v = variances_closed_form(label, params)
    assert float(rows[0]['chi1']) == pytest.approx(v.chi1, rel=1e-15)
    lhs = {r.pair: r.lhs for r in gur_report(label, params)}
    assert float(rows[0]['lhs_x1p1']) == pytest.approx(lhs['X1P1'], rel=1e-15)
    # phases move, and with q < 1 the variances follow
    assert abs(float(rows[1]['chi1']) - v.chi1) > 1e-9


def test_evolve_json(tmp_path):
    out = str(tmp_path / 'evolve.json')
    assert main(['evolve', '--times', '0', '0.5', '--format', 'json',
                 '--out', out]) == 0
    with open(out) as f:
        series = json.load(f)
    assert set(series) == set(EVOLVE_HEADER[1:])
    assert series['chi1'][1][0] == 0.5


def test_evolve_outside_radius(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5])
    assert main(['evolve', '--config', config,
                 '--label', '1.5', '0', '0', '0']) == 2


def test_format_float():
    assert format_float(1.0) == '1.0000000000000000e+00'
    assert format_float(-2.5e-300) == '-2.5000000000000000e-300'
    assert format_float(float('inf')) == 'inf'
    assert float(format_float(math.pi)) == math.pi


def test_documented_violation_scan(tmp_path):
    out = str(tmp_path / 'scan.csv')
    assert main(['sweep', '--config', VIOLATION_SCAN_CONFIG,
                 '--out', out]) == 0
    with open(out + '.summary.json') as f:
        summary = json.load(f)
    assert summary['evaluated'] == 64 * 64
    # the matrix-consistent series leave nothing below the bound
    assert summary['violation_witnesses'] == []
    assert summary['min_ratio']['min'] >= 1 - 1e-6
    assert summary['points'] == summary['evaluated']
    assert (summary['skipped'], summary['failed']) == (0, 0)
    assert summary['violations_by_regime'] == {'unit': 0, 'sub_unit': 0}
    assert summary['min_ratio']['count'] == 64 * 64


def test_sweep_rejects_short_fixed_cutoff(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], J1_grid=[1.2],
                           J2_grid=[1.2], gamma1_grid=[0.0, 1.0])
    out = str(tmp_path / 'short.csv')
    assert main(['sweep', '--config', config, '--cutoff', '3',
                 '--out', out]) == 1
    assert _read_csv(out) == []
    with open(out + '.summary.json') as f:
        summary = json.load(f)
    assert (summary['evaluated'], summary['failed']) == (0, 2)
    assert summary['skipped'] == 0


def test_sweep_fixed_cutoff_fails_only_long_tails(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], J1_grid=[0.1, 1.2])
    out = str(tmp_path / 'mixed.csv')
    assert main(['sweep', '--config', config, '--cutoff', '40',
                 '--out', out]) == 0
    rows = _read_csv(out)
    assert [float(r['J1']) for r in rows] == [0.1]
    with open(out + '.summary.json') as f:
        summary = json.load(f)
    assert (summary['evaluated'], summary['failed']) == (1, 1)


def test_sweep_json_is_strict(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], theta_grid=[0.0],
                           gamma1_grid=[0.0, 1.5])
    out = str(tmp_path / 'sweep.jsonl')
    assert main(['sweep', '--config', config, '--format', 'json',
                 '--out', out]) == 0
    with open(out) as f:
        records = [_strict_loads(line) for line in f]
    assert len(records) == 2
    # theta = 0 leaves the X1X2 bound at zero
    assert records[0]['ratio_x1x2'] == 'inf'
    ratios = {r['pair']: r['ratio'] for r in records[0]['reports']}
    assert ratios['X1P2'] == 'inf'
    assert float(ratios['X1P1']) == pytest.approx(1.0, abs=1e-10)
    with open(out + '.summary.json') as f:
        _strict_loads(f.read())


def test_to_json():
    assert to_json([float('-inf'), float('nan'), 1.5]) == '["-inf", "nan", 1.5]'
    assert _strict_loads(to_json({'a': {'b': float('inf')}})) == {'a': {'b': 'inf'}}


def test_verify_uses_configured_convention(tmp_path):
    config = _write_config(tmp_path, q_grid=[0.5], theta_grid=[0.3],
                           gamma1_grid=[2.0], J2_grid=[0.3])
    spectral = str(tmp_path / 'spectral.json')
    literal = str(tmp_path / 'literal.json')
    assert main(['verify', '--config', config, '--out', spectral]) == 0
    assert main(['verify', '--config', config, '--convention',
                 'paper-literal', '--out', literal]) == 1
    with open(literal) as f:
        summary = json.load(f)
    assert summary['config']['convention'] == 'paper-literal'
    assert not summary['suites']['crosscheck']['passed']
    assert summary['suites']['algebra']['passed']
