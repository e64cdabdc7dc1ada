"""Shared fixtures: default turbine, Cp surface, steady tables, gain schedule.

The tables and the regulator designs are expensive to build, so they are
constructed once per session and shared read-only across test modules.
"""

import numpy as np
import pytest

from turbine_lq.aero import CpModel
from turbine_lq.dynamics import TurbineParameters
from turbine_lq.lq import build_gain_schedule
from turbine_lq.refgen import build_tables


@pytest.fixture(scope="session")
def params():
    return TurbineParameters()


@pytest.fixture(scope="session")
def cp(params):
    return CpModel()


@pytest.fixture(scope="session")
def tables(params, cp):
    return build_tables(params, cp)


@pytest.fixture(scope="session")
def schedule(params, cp):
    return build_gain_schedule(params, cp, initial_wind=8.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_STATUS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and rep.when == "call":
        n = marker.args[0]
        if ACCEPTANCE_STATUS.get(n) != "FAIL":
            ACCEPTANCE_STATUS[n] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_STATUS:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_STATUS):
            terminalreporter.write_line(f"ACCEPTANCE {n}: {ACCEPTANCE_STATUS[n]}")
