"""Every acceptance criterion at full scale (n up to 10^8), one line per criterion."""

import pytest

from addfn_lab.acceptance import CRITERIA, NOMINAL_N, Scale

from conftest import ACCEPTANCE_LINES

SCALE = Scale(NOMINAL_N)


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = CRITERIA[number](SCALE)
    line = res.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert res.passed, line
