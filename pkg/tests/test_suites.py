import json

import pytest

from dkh.suites import CRITERIA, SUITES, Result, run_suite, suite_names


def test_registry():
    assert SUITES["acceptance"] == list(CRITERIA)
    assert "lemma23" in suite_names()
    for k in CRITERIA:
        assert SUITES[k] == [k]
    with pytest.raises(KeyError):
        run_suite("nope")


def test_result_record_is_json():
    r = Result("c0", True, {"n": 1}, 0.5)
    assert r.status == "pass"
    assert json.loads(json.dumps(r.record())) == {"name": "c0", "status": "pass", "witness": {"n": 1}}
    assert Result("c0", False).status == "fail"


def test_witnesses_are_plain_data():
    for r in run_suite("quick"):
        json.dumps(r.witness)
        assert r.witness["title"] == CRITERIA[r.name][0]


def test_depth_override_reaches_depth_aware_checks():
    (r,) = run_suite("c6", depth=2)
    assert r.passed
