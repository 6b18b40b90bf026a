import math

import numpy as np
import pytest

from nblpdec.code import example_matrix
from nblpdec.dual import prepare

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "_criterion", None)
    if crit is not None and _CRITERIA.get(crit) != "failed":
        # a criterion spread over several tests passes only if all of them do
        _CRITERIA[crit] = report.outcome


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep._criterion = (mark.args[0], mark.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), outcome in sorted(_CRITERIA.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} {verdict}  {title}")


@pytest.fixture(scope="session")
def H52():
    return example_matrix()


@pytest.fixture(scope="session")
def graph52(H52):
    return prepare(H52)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def assert_close_inf(a, b, rtol=0.0, atol=0.0):
    """Elementwise closeness where equal infinities count as equal."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    assert a.shape == b.shape
    assert np.array_equal(np.isinf(a), np.isinf(b))
    inf = np.isinf(a)
    assert np.array_equal(a[inf], b[inf])
    np.testing.assert_allclose(a[~inf], b[~inf], rtol=rtol, atol=atol)


INF = math.inf
