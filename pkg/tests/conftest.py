"""Shared pytest plumbing: one printed verdict line per acceptance criterion."""

_CRITERIA: dict[str, tuple] = {}
_RESULTS: dict[int, tuple] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(number, description): criterion reported after the run",
    )


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            _CRITERIA[item.nodeid] = marker.args


def pytest_runtest_logreport(report):
    entry = _CRITERIA.get(report.nodeid)
    if entry is None:
        return
    number, description = entry
    if report.when == "call":
        _RESULTS[number] = (description, report.passed)
    elif not report.passed:
        # a setup or teardown error also sinks the criterion
        _RESULTS[number] = (description, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        description, passed = _RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number}: {verdict} - {description}")
