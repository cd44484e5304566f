"""Acceptance gate: every criterion at its stated tolerance and runtime budget.

Each test prints one ``[PASS]``/``[FAIL]`` line (visible even under output
capture) followed by the criterion's numeric details.  Nothing here is
marked xfail; a criterion that does not hold fails.
"""

import json

import pytest

from rotset.acceptance import CRITERIA


def _jsonable(obj):
    return obj.tolist() if hasattr(obj, "tolist") else str(obj)


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1), ids=lambda n: f"criterion_{n}")
def test_criterion(number, capsys):
    res = CRITERIA[number - 1]()
    with capsys.disabled():
        print()
        print(res.line)
        print("    " + json.dumps(res.details, sort_keys=True, default=_jsonable)[:2000])
    assert res.passed, res.line
