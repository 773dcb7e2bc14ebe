import pytest

from roomsense.macaddr import MacAddress
from roomsense.radio import AccessPoint, PathLossParams, Point2D, RadioEnvironment, Room

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_ac" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


def mac(i):
    return MacAddress(bytes([0x02, 0, 0, 0, 0, i]))


@pytest.fixture
def line_env():
    """One AP at the origin, noise-free, tx 20 dBm, pl0 40 dB, n = 3."""
    rooms = [Room(1, Point2D(0, 0), Point2D(4, 4)), Room(2, Point2D(4, 0), Point2D(8, 4))]
    aps = [AccessPoint(0, mac(1), Point2D(0, 0), 20.0)]
    params = PathLossParams(pl0=40.0, exponent=3.0, shadow_sigma=0.0, floor=-100, ceiling=0)
    return RadioEnvironment(rooms, aps, params, seed=1)
