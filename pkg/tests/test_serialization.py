import json

import numpy as np
import pytest

from utils.serialization import dumps, format_float, table_rows, to_csv


@pytest.mark.parametrize("value, text", [
    (0.1, '0.10000000000000001'),
    (1.0, '1.0'),
    (-2.0, '-2.0'),
    (1e-12, '9.9999999999999998e-13'),
    (float('nan'), 'null'),
])
def test_format_float(value, text):
    assert format_float(value) == text


def test_dumps_round_trips_exactly():
    document = {'b': 1 / 3, 'a': [np.float64(2.5), np.int64(3), True, None], 'nested': {'x': 'ü'}}
    parsed = json.loads(dumps(document))
    assert parsed == {'b': 1 / 3, 'a': [2.5, 3, True, None], 'nested': {'x': 'ü'}}
    assert list(parsed) == ['b', 'a', 'nested']


def test_dumps_arrays_and_empty_containers():
    parsed = json.loads(dumps({'v': np.array([1.0, 2.0]), 'e': [], 'd': {}}))
    assert parsed == {'v': [1.0, 2.0], 'e': [], 'd': {}}


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        dumps({'x': object()})


def test_csv_uses_trial_rows():
    report = {'results': {'trials': [{'trial': 0, 'outcomes': [1, 2], 'fidelity': 0.5},
                                     {'trial': 1, 'outcomes': [0, 3], 'fidelity': None}]}}
    lines = to_csv(report).splitlines()
    assert lines[0] == 'trial,outcomes,fidelity'
    assert lines[1] == '0,1;2,0.5'
    assert lines[2] == '1,0;3,'


def test_csv_falls_back_to_scalars():
    report = {'results': {'entropy_bits': 2.0, 'block': [1, 2], 'assertions': []}}
    assert table_rows(report) == [{'entropy_bits': 2.0}]
