"""The eleven acceptance criteria at their stated tolerances and runtime budgets.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary under "acceptance criteria".
"""

import pytest

from brmeans import acceptance

CHECKS = list(enumerate(acceptance.ALL_CHECKS, start=1))


@pytest.mark.parametrize("number,check", CHECKS, ids=[c.__name__ for _, c in CHECKS])
def test_criterion(number, check, acceptance_log):
    result = check()
    line = result.line()
    print(line)
    acceptance_log.append((number, line))
    assert result.number == number
    assert result.passed, line
