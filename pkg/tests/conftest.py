"""Shared pytest hooks.

Tests tagged ``@pytest.mark.criterion("name")`` are acceptance criteria; a
criterion passes only if every test carrying its name passes.  One PASS/FAIL
line per criterion is printed at the end of the run, followed by any
measurements the tests recorded through the ``acceptance_note`` fixture.
"""
import pytest

_outcomes = {}   # criterion -> list of (nodeid, passed)
_notes = {}      # criterion -> list of text lines


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


@pytest.fixture
def acceptance_note(request):
    """Callable that attaches a line of text to the test's criterion."""
    marker = request.node.get_closest_marker("criterion")
    name = marker.args[0] if marker else request.node.nodeid
    return lambda text: _notes.setdefault(name, []).append(str(text))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(name, []).append((item.nodeid, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, results in _outcomes.items():
        ok = all(passed for _, passed in results)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
        for text in _notes.get(name, []):
            tr.write_line(f"        {text}")
