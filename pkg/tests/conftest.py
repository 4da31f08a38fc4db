import numpy as np
import pytest

from nrnet.generators import random_chain, random_disjoint_sets

CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            CRITERIA.setdefault(number, {"title": title, "outcomes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        number = mark.args[0]
        if report.when == "call" or report.failed:
            CRITERIA[number]["outcomes"].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        entry = CRITERIA[number]
        if not entry["outcomes"]:
            status = "NOT RUN"
        else:
            status = "PASS" if all(entry["outcomes"]) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}: {entry['title']}")


@pytest.fixture(scope="session")
def problems():
    """25 random chains (3-8 states) with random disjoint A, B."""
    rng = np.random.default_rng(20240)
    out = []
    for _ in range(25):
        n = int(rng.integers(3, 9))
        chain = random_chain(n, rng)
        A, B = random_disjoint_sets(n, rng)
        out.append((chain, A, B))
    return out
