import time

import pytest

SESSION = {"start": None}
CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_sessionstart(session):
    SESSION["start"] = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # acceptance items run last so the runtime criterion sees the whole suite
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    entry = CRITERIA.setdefault(n, {"title": title, "ok": True, "tests": 0})
    if rep.when == "call":
        entry["tests"] += 1
    if rep.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        c = CRITERIA[n]
        status = "PASS" if c["ok"] and c["tests"] else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {c['title']}")


@pytest.fixture
def session_start():
    return SESSION["start"]
