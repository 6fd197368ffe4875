import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("oklab", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("oklab")

_criteria: dict[int, tuple[str, bool, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    _criteria[number] = (title, report.passed, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, duration = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title}  ({duration:.2f}s)")
