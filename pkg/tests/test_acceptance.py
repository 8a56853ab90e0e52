"""The twelve acceptance criteria, one test each.

Each test prints the criterion's PASS/FAIL line; the lines are also collected
and repeated in the terminal summary. Criteria 1 and 6 compare against
displayed formulas that contain misprints, so they fail as written; the
corrected facts are tested in test_moduli.py and test_energy_gap.py.
"""

import pytest

from projheat.acceptance import run_criterion

LINES: list[str] = []

KNOWN_MISPRINTS = {
    1: "displayed R_phi has factor (xy - phi); the computed factor is (xy - phi^2)",
    6: "displayed N(1/2,1/2;lambda) omits a factor lambda",
}


def _check(number: int):
    result = run_criterion(number, seed=0)
    line = result.line()
    print(line)
    LINES.append(line)
    assert line.startswith("[PASS]" if result.passed else "[FAIL]")
    assert result.passed, line


@pytest.mark.parametrize("number", [
    pytest.param(n, marks=pytest.mark.xfail(strict=True, reason=KNOWN_MISPRINTS[n])) if n in KNOWN_MISPRINTS else n
    for n in range(1, 13)
])
def test_criterion(number):
    _check(number)
