import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_criteria: dict[int, tuple[str, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _criteria[mark.args[0]] = (doc, "NOT RUN")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for number, (doc, _) in _criteria.items():
        if report.nodeid.endswith(f"test_criterion_{number:02d}"):
            _criteria[number] = (doc, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    ran = {k: v for k, v in _criteria.items() if v[1] != "NOT RUN"}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ran):
        doc, verdict = ran[number]
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {doc}")
