import random

import pytest

from triq.algebra import QQ, PrimeField

from oracles import ACCEPTANCE_LINES

FIELDS = [PrimeField(101), PrimeField(5), QQ]


@pytest.fixture
def rng():
    return random.Random(20261016)


@pytest.fixture(params=FIELDS, ids=str)
def field(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    label = marker.args[0]
    status = "PASS" if rep.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"{status}  {label}  ({call.duration:.2f}s)")
