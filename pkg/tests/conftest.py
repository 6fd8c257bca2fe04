import re

from hypothesis import HealthCheck, settings

settings.register_profile("pinsep", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pinsep")

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.failed):
        _ACCEPTANCE.append(report)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    for r in _ACCEPTANCE:
        num = int(re.search(r"criterion_(\d+)", r.nodeid).group(1))
        detail = dict(r.user_properties).get("detail", "")
        verdict = "PASS" if r.passed else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict} ({r.duration:.1f} s) {detail}".rstrip())
