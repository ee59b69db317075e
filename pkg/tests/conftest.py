_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = _outcomes.get(report.nodeid)
    if marker is not None:
        marker["passed"] = report.passed
        marker["seconds"] = report.duration


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            number, title = m.args
            _outcomes[item.nodeid] = {"number": number, "title": title, "passed": None, "seconds": 0.0}


def pytest_terminal_summary(terminalreporter):
    ran = [o for o in _outcomes.values() if o["passed"] is not None]
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for o in sorted(ran, key=lambda o: str(o["number"])):
        status = "PASS" if o["passed"] else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {o['number']}: {o['title']} ({o['seconds']:.1f} s)")
