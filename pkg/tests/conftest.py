import random
import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one test per acceptance criterion")


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    n = int(m.group(1))
    status = "PASS" if report.passed else "FAIL"
    if n in _outcomes and _outcomes[n][0] == "FAIL":
        return
    detail = " ".join(line.strip() for _, text in report.sections if "stdout" in _
                      for line in text.splitlines() if line.strip())
    _outcomes[n] = (status, m.group(2).replace("_", " "), detail)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        status, name, detail = _outcomes[n]
        line = f"criterion {n:2d} {status}  {name}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
