"""Acceptance gate: every criterion at its stated size and tolerance.

Set REINFORCED_EP_PROFILE=quick for a fast smoke run; the default is full.
One status line per criterion is printed as it finishes and repeated in the
terminal summary.
"""

import os

import pytest

from reinforced_ep.acceptance import CRITERIA

from conftest import ACCEPTANCE_LINES

PROFILE = os.environ.get("REINFORCED_EP_PROFILE", "full")


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion_{c.number:02d}")
def test_criterion(criterion):
    report = criterion.run(PROFILE, 1)
    line = f"criterion {criterion.number:2d} ({criterion.name}, {PROFILE}): {report.line()}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert report.passed, report.to_json()
