"""Runs the eleven reproduction criteria, one pass/fail line each."""

import pytest

from cpsrel import acceptance


@pytest.mark.parametrize("number", [c[0] for c in acceptance.CRITERIA])
def test_criterion(number, acceptance_log):
    r = acceptance.run_criterion(number)
    line = r.line()
    for k, v in r.findings.items():
        line += f"\n      finding: {k} = {v}"
    print(line)
    acceptance_log.append(line)
    assert r.passed, r.detail
