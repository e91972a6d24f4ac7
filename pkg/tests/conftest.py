import numpy as np
import pytest

from elotope.game import PayoffMatrix, SelectionMatrix

LN3 = float(np.log(3.0))
CYCLIC = np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])


def random_skew(rng, m, scale=2.0):
    x = rng.uniform(-scale, scale, size=(m, m))
    return np.triu(x, 1) - np.triu(x, 1).T


def payoff_of(a):
    """Logistic payoff of a skew matrix, built without the library's conversion."""
    p = 1.0 / (1.0 + np.exp(-np.asarray(a, dtype=float)))
    iu = np.triu_indices(len(p), 1)
    p[(iu[1], iu[0])] = 1.0 - p[iu]
    np.fill_diagonal(p, 0.5)
    return PayoffMatrix(p)


def random_connected_q(rng, m):
    """Random path backbone over a random permutation plus random extra edges."""
    w = np.zeros((m, m))
    order = rng.permutation(m)
    for a, b in zip(order[:-1], order[1:]):
        w[a, b] = rng.uniform(0.2, 1.0)
    extra = np.triu(rng.random((m, m)) < 0.4, 1) * rng.uniform(0.2, 1.0, size=(m, m))
    w = np.triu(w + w.T + extra, 1)
    w = w + w.T
    return SelectionMatrix(2.0 * w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# --- acceptance reporting: one line per criterion in the terminal summary ---

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _ACCEPTANCE[number] = (title, report.outcome.upper(), report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome, duration = _ACCEPTANCE[number]
        status = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"AC-{number:02d} {status}  {title}  ({duration:.2f}s)")
