import json
import pytest

from ProxSeq.errors import InputError, SolverError
import ProxSeq.cli
from ProxSeq.cli import parse_args, main, cmd_construct


def test_parse_args():
    command, positional, options = parse_args(
        ['analyze', 'gevrey:1', '--out', 'r.json', '-no_timestamp', '-horizon', '1000'])
    assert command == 'analyze'
    assert positional == ['gevrey:1']
    assert options == {'out': 'r.json', 'no_timestamp': 'true', 'horizon': '1000'}


def test_parse_negative_value():
    _, _, options = parse_args(['construct', 'const:1', '-construct_xmin', '-10'])
    assert options == {'construct_xmin': '-10'}


def test_options_file(tmp_path):
    path = tmp_path / 'options.txt'
    path.write_text('-pmax 64  # terms\n-no_timestamp\n')
    command, positional, options = parse_args(['construct', 'const:1', '-options_file', str(path)])
    assert positional == ['const:1']
    assert options == {'pmax': '64', 'no_timestamp': 'true'}


@pytest.mark.parametrize('argv', [[], ['nope'], ['analyze', '-options_file', '/no/such/file']])
def test_parse_rejects(argv):
    with pytest.raises(InputError):
        parse_args(argv)


@pytest.mark.parametrize('argv', [['nope'], ['analyze'], ['analyze', 'gevrey:0'],
                                  ['construct', 'const:0'], ['admit', 'gevrey:1']])
def test_input_errors_exit_1(argv):
    assert main(argv) == 1


@pytest.mark.parametrize('error', [SolverError('no bracket'), OverflowError('math range error'),
                                   ZeroDivisionError('float division by zero'),
                                   ValueError('array must not contain infs or NaNs')])
def test_numerical_errors_exit_2(monkeypatch, error):
    def failing(command, positional):
        raise error
    monkeypatch.setattr(ProxSeq.cli, '_run', failing)
    assert main(['analyze', 'gevrey:1', '-horizon', '1000']) == 2


def test_input_error_from_command_exits_1(monkeypatch):
    def failing(command, positional):
        raise InputError('bad family')
    monkeypatch.setattr(ProxSeq.cli, '_run', failing)
    assert main(['analyze', 'gevrey:1']) == 1


def test_construct_rejects_zero_order():
    with pytest.raises(InputError):
        cmd_construct('const:0', pmax=64)


def test_analyze_writes_report(tmp_path):
    out = tmp_path / 'gevrey.json'
    csv = tmp_path / 'gevrey.csv'
    argv = ['analyze', 'gevrey:1', '-horizon', '65536', '-no_timestamp',
            '-out', str(out), '-csv', str(csv)]
    assert main(argv) == 0
    data = json.loads(out.read_text())
    assert data['command'] == 'analyze'
    names = [c['name'] for c in data['checks']]
    assert names[:4] == ['lc', 'mg', 'mg_beta', 'snq']
    assert csv.read_text().splitlines()[0] == 'p,log_m,mean_log_m,beta'
    # options do not leak into later runs
    assert main(argv[:2] + ['-horizon', '65536', '-no_timestamp']) == 0
    assert json.loads(out.read_text()) == data


def test_suite_filter(tmp_path):
    path = tmp_path / 'matrix.json'
    assert main(['suite', '-filter', 'moricz', '-json', str(path), '-no_timestamp']) == 0
    data = json.loads(path.read_text())
    assert [c['name'] for c in data['checks']] == ['moricz_normalizer']
    assert data['status'] == 'pass'
