import pytest

from mubverify import _backend
from mubverify.mub import build_mub, build_strategy

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = dict(item.user_properties).get("detail", "")
        _criteria.append((marker.args[0], marker.args[1], report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, passed, detail in sorted(_criteria, key=lambda c: str(c[0])):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {text}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def qutrit_strategy():
    return build_strategy(build_mub(3))


@pytest.fixture(params=sorted(_backend.available()))
def backend(request):
    return _backend.available()[request.param]
