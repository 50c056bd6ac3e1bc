"""The eight acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible with ``pytest -v``
output captured to a file or with ``-s``) and fails if the criterion fails.
"""

import pytest

from ricci_qc.acceptance import CRITERIA, SuiteOptions, run_criterion


@pytest.fixture(scope="module")
def options():
    return SuiteOptions()


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, options, capsys):
    result = run_criterion(number, options)
    with capsys.disabled():
        print(f"\n{result.line()}  [{result.elapsed:.1f}s]")
        for f in result.failures[:10]:
            print(f"    {f}")
    assert result.passed, "\n".join(result.failures[:10])


def test_negative_control_conserved_fault():
    result = run_criterion(2, SuiteOptions(fault="conserved"))
    assert not result.passed
