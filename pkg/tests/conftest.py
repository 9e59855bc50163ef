from __future__ import annotations

import re

import pytest
from hypothesis import HealthCheck, settings

from robustgap import RngStream

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA: dict[int, tuple[str, list[str]]] = {}


@pytest.fixture
def rng(request) -> RngStream:
    """A stream unique to the requesting test."""
    return RngStream(20240601).child(request.node.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)_(\w+)", item.name)
    if m is None or item.get_closest_marker("acceptance") is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        # a criterion split over several tests passes only if all of them do
        name, statuses = _CRITERIA.setdefault(int(m.group(1)), (m.group(2).replace("_", " "), []))
        statuses.append(status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        name, statuses = _CRITERIA[k]
        status = "FAIL" if "FAIL" in statuses else ("SKIP" if "SKIP" in statuses else "PASS")
        terminalreporter.write_line(f"criterion {k:2d} [{name}]: {status}")
