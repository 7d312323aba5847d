import pytest

from tdatalog.lang import parse_dataset, parse_program
from tdatalog.samples import sample_text

# nodeid -> (number, title) for tests marked as acceptance criteria
_MARKED = {}
# number -> (title, outcome, seconds)
_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _MARKED[item.nodeid] = m.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _MARKED:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = _MARKED[report.nodeid]
        _OUTCOMES[number] = (title, report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES, key=lambda k: (not k.isdigit(), int(k) if k.isdigit() else 0, k)):
        title, outcome, seconds = _OUTCOMES[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {number}: {title} ({seconds:.2f} s)")


@pytest.fixture(scope="session")
def sample_program():
    return parse_program(sample_text("fig1.tdl"))


@pytest.fixture(scope="session")
def sample_data():
    return parse_dataset(sample_text("fig1.tdf"))
