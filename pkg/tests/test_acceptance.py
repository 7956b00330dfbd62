"""Acceptance criteria at full size; one PASS/FAIL line is printed per criterion.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest.
"""

import sys

import pytest

from borel_rigidity.checks import ACCEPTANCE, CheckResult


def _report(result: CheckResult, capsys=None):
    line = result.line()
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return result


@pytest.mark.parametrize("check", ACCEPTANCE, ids=[f"AC{i + 1}" for i in range(len(ACCEPTANCE))])
def test_acceptance(check, capsys):
    result = _report(check(), capsys)
    assert result.passed, result.detail


if __name__ == "__main__":
    results = [_report(check()) for check in ACCEPTANCE]
    sys.exit(0 if all(r.passed for r in results) else 1)
