"""Shared pytest setup: make the test helpers importable and report acceptance results."""
from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from acceptance_log import RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
