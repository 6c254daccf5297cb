"""Acceptance criteria 1-12 at their stated tolerances and full sample sizes.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly: ``python tests/test_acceptance.py``.
"""

import sys

import pytest

from tailorder.verification import CRITERIA, run_criterion

SEED = 1
RESULTS = {}


def line(r):
    status = "PASS" if r.passed else "FAIL"
    return f"criterion {r.cid:2d} {status}  {r.name}  observed={r.observed!r}  tolerance={r.tolerance!r}"


@pytest.mark.parametrize("cid", range(1, len(CRITERIA) + 1))
def test_criterion(cid):
    r = run_criterion(cid, "full", SEED)
    RESULTS[cid] = r
    assert r.passed, line(r)


if __name__ == "__main__":
    failed = 0
    for cid in range(1, len(CRITERIA) + 1):
        r = run_criterion(cid, "full", SEED)
        print(line(r), flush=True)
        failed += not r.passed
    sys.exit(1 if failed else 0)
