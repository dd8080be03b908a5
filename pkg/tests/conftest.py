import re

import pytest

_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[key] = (report.outcome, report.longrepr)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        outcome, longrepr = _criteria[key]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {key}: {status}"
        if status == "FAIL" and longrepr is not None:
            msg = getattr(getattr(longrepr, "reprcrash", None), "message", str(longrepr))
            line += "  (" + msg.splitlines()[0][:160] + ")"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)
