"""Shared fixtures and the per-criterion acceptance report."""

from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest

from momenta.phase_arith import UNIT_INTERVAL

_criteria: dict[int, dict] = defaultdict(lambda: {"title": "", "passed": 0, "failed": 0})


@pytest.fixture
def unit_interval():
    return UNIT_INTERVAL


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_collection_modifyitems(config, items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            item.user_properties.append(("criterion", number))
            _criteria[number]["title"] = title


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.outcome == "failed":
        _criteria[number]["passed" if report.passed else "failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        ran = entry["passed"] + entry["failed"]
        status = "FAIL" if entry["failed"] else ("PASS" if ran else "NOT RUN")
        terminalreporter.write_line(
            f"[{status}] criterion {number:2d}: {entry['title']} ({entry['passed']}/{ran} checks)"
        )
