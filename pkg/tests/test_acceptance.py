"""Runs every shipped verification criterion and reports one line each."""

import pytest

from ldplab import suite


@pytest.mark.parametrize("criterion", suite.CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion, capsys):
    result = criterion()
    line = f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.details}"
    with capsys.disabled():
        print(line)
    assert result.passed, line
