import pytest

_verdicts = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion with a one-line verdict")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    ok = rep.passed and _verdicts.get(n, True)
    _verdicts[n] = ok
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    item.config._acceptance_lines = getattr(item.config, "_acceptance_lines", {})
    item.config._acceptance_lines[n] = line


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
