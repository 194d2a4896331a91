import os
import sys
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES = []


def data_path(*parts):
    return str(resources.files("wikivote").joinpath("data", *parts))


@pytest.fixture
def fig2_dir():
    return data_path("fig2")


@pytest.fixture
def worked_dir():
    return data_path("worked")


@pytest.fixture
def synthetic_dir():
    return data_path("synthetic")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, text = marker.args
        status = "PASS" if report.passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {text}")
