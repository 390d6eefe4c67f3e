import math

import pytest

from kofn_reliability import SystemParams

_acceptance: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: Monte Carlo tests taking several seconds")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        cid, title = marker
        if report.nodeid.endswith("]"):
            cid += report.nodeid[report.nodeid.rindex("["):]
        _acceptance.append((cid, title, "PASS" if report.passed else "FAIL"))


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            item.user_properties.append(("acceptance", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, outcome in sorted(_acceptance):
        terminalreporter.write_line(f"{outcome}  {cid}  {title}")


@pytest.fixture
def two_disk():
    """n=2, k=1, lam=1, t_rep=ln 2: the hand-solvable case (MTDL 2, P(1) 0.3)."""
    return SystemParams(2, 1, 1.0, math.log(2.0))
