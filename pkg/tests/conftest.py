import pytest

from drgforge.bilform import construct


@pytest.fixture(scope="session")
def bil222():
    return construct(2, 2, 2)


@pytest.fixture(scope="session")
def bil232():
    return construct(2, 3, 2)


@pytest.fixture(scope="session")
def bil233():
    return construct(2, 3, 3)


@pytest.fixture(scope="session")
def bil322():
    return construct(3, 2, 2)


# one summary line per acceptance criterion ------------------------------------------

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = _criterion_marks.get(report.nodeid)
    if mark is None:
        return
    num, text = mark
    entry = _criteria.setdefault(num, {"text": text, "ok": True, "seen": False})
    entry["seen"] = True
    if report.outcome != "passed":
        entry["ok"] = False


_criterion_marks: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criterion_marks[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        c = _criteria[num]
        status = "PASS" if c["ok"] and c["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {c['text']}")
