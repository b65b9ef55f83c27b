import json

import pytest

from core.errors import ValidationError
from quditsinglet import main, parse_arguments


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_block_entropy_json(capsys):
    code, captured = run_cli(capsys, 'block-entropy', '--n', '4', '--l', '2')
    assert code == 0
    report = json.loads(captured.out)
    assert report['command'] == 'block-entropy'
    assert report['pass'] is True
    assert report['results']['entropy_bits'] == pytest.approx(2.584962500721156)


def test_ground_state_example(capsys):
    code, captured = run_cli(capsys, 'ground-state', '--topology', 'chain', '--n', '3', '--d', '3')
    assert code == 0
    assert json.loads(captured.out)['results']['energy'] == pytest.approx(-2.0, abs=1e-8)


def test_persistency_ghz(capsys):
    code, captured = run_cli(capsys, 'persistency', '--state', 'ghz', '--n', '3', '--trials', '5')
    assert code == 0
    assert json.loads(captured.out)['results']['upper_bound'] == 1


def test_domain_error_exit_status(capsys):
    code, captured = run_cli(capsys, 'ground-state', '--topology', 'ring', '--n', '2')
    assert code == 2
    document = json.loads(captured.out)
    assert document['error'] == 'DomainError'
    assert document['command'] == 'ground-state'


def test_unknown_config_key(capsys, tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'command': 'block-entropy', 'params': {'size': 3}}))
    code, captured = run_cli(capsys, 'block-entropy', '--config', str(path))
    assert code == 2
    assert json.loads(captured.out)['error'] == 'ValidationError'


def test_unreadable_config(capsys, tmp_path):
    code, _ = run_cli(capsys, 'block-entropy', '--config', str(tmp_path / 'missing.json'))
    assert code == 2


def test_regime_error_exit_status(capsys):
    code, captured = run_cli(capsys, 'hubbard-check', '--t', '0.5', '--u', '1')
    assert code == 3
    document = json.loads(captured.out)
    assert document['error'] == 'RegimeError'
    assert document['ratio'] == pytest.approx(0.5)


def test_budget_error_exit_status(capsys):
    code, captured = run_cli(capsys, 'persistency', '--state', 'singlet', '--n', '3', '--budget', '2')
    assert code == 3
    assert json.loads(captured.out)['best_so_far'] == 2


def test_csv_format(capsys):
    code, captured = run_cli(capsys, 'measure-cascade', '--n', '4', '--m', '2', '--trials', '3',
                             '--format', 'csv')
    assert code == 0
    lines = captured.out.splitlines()
    assert lines[0].startswith('trial,outcomes,probabilities')
    assert len(lines) == 4


def test_table_format(capsys):
    code, captured = run_cli(capsys, 'localize', '--n', '4', '--block-a', '1', '--block-b', '2',
                             '--trials', '2', '--format', 'table')
    assert code == 0
    assert 'localised_entropy' in captured.out


def test_report_to_file_with_extras(capsys, tmp_path):
    out = tmp_path / 'report.json'
    code, captured = run_cli(capsys, 'block-entropy', '--out', str(out), '--html', '--excel',
                             '--output-dir', str(tmp_path / 'reports'))
    assert code == 0
    assert captured.out == ''
    assert json.loads(out.read_text())['pass'] is True
    assert len(list((tmp_path / 'reports').iterdir())) == 2


def test_config_file_then_flags(capsys, tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'command': 'block-entropy', 'params': {'n': 5, 'l': 1}}))
    code, captured = run_cli(capsys, 'block-entropy', '--config', str(path), '--l', '2')
    assert code == 0
    assert json.loads(captured.out)['params']['l'] == 2
    assert json.loads(captured.out)['params']['n'] == 5


def test_identical_seeds_identical_reports(capsys):
    _, first = run_cli(capsys, 'measure-cascade', '--n', '4', '--m', '2', '--seed', '9')
    _, second = run_cli(capsys, 'measure-cascade', '--n', '4', '--m', '2', '--seed', '9')
    a, b = json.loads(first.out), json.loads(second.out)
    a.pop('wall_time_ms')
    b.pop('wall_time_ms')
    assert a == b


def test_subcommand_required(capsys):
    with pytest.raises(ValidationError):
        parse_arguments([])
    code, captured = run_cli(capsys)
    assert code == 2
    document = json.loads(captured.out)
    assert document['error'] == 'ValidationError'
    assert document['command'] is None


@pytest.mark.parametrize("argv", [
    ('measure-cascade', '--n', 'abc'),
    ('block-entropy', '--no-such-flag'),
    ('verify-all', '--level', 'huge'),
])
def test_usage_errors_emit_error_document(capsys, argv):
    code, captured = run_cli(capsys, *argv)
    assert code == 2
    document = json.loads(captured.out)
    assert document['error'] == 'ValidationError'
    assert document['command'] == argv[0]
