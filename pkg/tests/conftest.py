import re

import numpy as np
import pytest

from helpers import ACCEPTANCE

N_CRITERIA = 14


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    # a criterion test that raised before reporting still counts as a failure
    m = re.search(r"test_acceptance\.py::.*::test_(\d+)_", report.nodeid)
    if m and report.failed and int(m.group(1)) not in ACCEPTANCE:
        ACCEPTANCE[int(m.group(1))] = (False, f"raised during {report.when}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, N_CRITERIA + 1):
        if number in ACCEPTANCE:
            ok, detail = ACCEPTANCE[number]
            status = "PASS" if ok else "FAIL"
        else:
            status, detail = "NOT RUN", "deselected in this session"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
