import numpy as np
import pytest

from core.acceptance import (CRITERIA, arbitrary_antisymmetry, block_entropies, determinism,
                             exchange_identities, hubbard, reck, verify_all)
from core.scenario import DEFAULTS

QUICK = DEFAULTS['levels']['quick']


@pytest.mark.parametrize("criterion", [
    exchange_identities, block_entropies, arbitrary_antisymmetry, reck, hubbard, determinism,
])
def test_fast_criteria_pass(criterion):
    outcome = criterion(QUICK, np.random.default_rng(0))
    assert outcome
    assert all(a.passed for a in outcome), [a.name for a in outcome if not a.passed]


def test_criteria_names_are_unique():
    names = [name for name, _ in CRITERIA]
    assert len(names) == len(set(names))


@pytest.mark.slow
def test_quick_level_passes():
    report = verify_all(0, 'quick')
    assert report.passed, report.results['trials']
    assert report.results['max_n'] == 4


@pytest.mark.slow
def test_quick_level_is_reproducible():
    first = verify_all(3, 'quick').to_dict()
    second = verify_all(3, 'quick').to_dict()
    first.pop('wall_time_ms')
    second.pop('wall_time_ms')
    assert first == second


@pytest.mark.slow
def test_full_level_passes():
    assert verify_all(0, 'full').passed
