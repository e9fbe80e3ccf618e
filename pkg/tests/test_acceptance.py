"""Acceptance criteria 1-12, one printed pass/fail line each.

The lines are collected in ``LINES`` and echoed in the terminal summary by
conftest.py, so plain ``pytest -v`` shows them.  Every check is exact; the
time limits are the per-criterion budgets.
"""
import pytest

from dkh.suites import CRITERIA, run_suite

# criterion -> (suite keys, seconds allowed)
PLAN = {
    1: (["c1"], 5),
    2: (["c2"], 5),
    3: (["c3"], 10),
    4: (["c4"], 30),
    5: (["c5"], 60),
    6: (["c6"], 30),
    7: (["c7"], 30),
    8: (["c8"], 60),
    9: (["c9", "c9b"], 10),
    10: (["c10", "c10b"], 120),
    11: (["c11"], 60),
    12: (["c12"], 120),
}

LINES = []


def test_plan_covers_every_check():
    assert sorted(k for keys, _ in PLAN.values() for k in keys) == sorted(CRITERIA)


@pytest.mark.parametrize("number", sorted(PLAN))
def test_criterion(number):
    keys, budget = PLAN[number]
    results = [r for k in keys for r in run_suite(k)]
    seconds = sum(r.seconds for r in results)
    passed = all(r.passed for r in results) and seconds < budget
    detail = "; ".join(f"{r.name} {r.status} {r.seconds:.2f}s {r.witness['title']}" for r in results)
    LINES.append(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  ({detail})")
    print(LINES[-1])
    failing = {r.name: r.witness for r in results if not r.passed}
    assert not failing, failing
    assert seconds < budget
