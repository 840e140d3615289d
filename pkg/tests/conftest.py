from hypothesis import settings

# Exact arithmetic on random inputs has heavy-tailed runtimes; the default
# deadline only produces flaky failures.
settings.register_profile("geodfs", deadline=None, max_examples=80)
settings.load_profile("geodfs")

_criteria = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.append((report.outcome, props["criterion"], props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for outcome, name, detail in _criteria:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}: {detail}")
