"""Acceptance gate: every criterion at its stated tolerance.

The registry in finslerproj.verify is executed once per session; each test
asserts one criterion and prints its pass/fail line. The final entry is the
single-process runtime budget of the whole suite.
"""

import json

import pytest

from finslerproj.verify import run_all

_RESULTS = None


def _results():
    global _RESULTS
    if _RESULTS is None:
        _RESULTS = {r.key: r for r in run_all()}
    return _RESULTS


def _keys():
    # stable listing without running the suite at collection time
    return ["criterion_01", "criterion_02", "criterion_03", "criterion_04",
            "criterion_05", "criterion_06", "criterion_07", "criterion_08",
            "criterion_09", "criterion_10", "criterion_11",
            "invariant_metric_axioms", "criterion_12"]


@pytest.mark.parametrize("key", _keys())
def test_criterion(key):
    result = _results()[key]
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {result.key}: {result.name} ({result.duration:.2f}s)")
    assert result.passed, json.dumps(result.details, default=str, indent=2)
