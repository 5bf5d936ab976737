from __future__ import annotations

import numpy as np
import pytest

from dea_bench.data_model import DmuId, FactorMatrix

_ACCEPTANCE: dict[int, dict] = {}


def make_fm(X, Y, codes=None) -> FactorMatrix:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = X.shape[0]
    codes = codes or [chr(ord("A") + i) if n <= 26 else f"U{i:03d}" for i in range(n)]
    return FactorMatrix(
        tuple(DmuId(c, c) for c in codes),
        X,
        Y,
        tuple(f"x{i}" for i in range(X.shape[1])),
        tuple(f"y{i}" for i in range(Y.shape[1])),
    )


def random_fm(rng, n=None, m=None, s=None) -> FactorMatrix:
    n = n or int(rng.integers(3, 10))
    m = m or int(rng.integers(1, 4))
    s = s or int(rng.integers(1, 3))
    return make_fm(rng.uniform(1.0, 100.0, (n, m)), rng.uniform(1.0, 100.0, (n, s)))


@pytest.fixture
def fm_factory():
    return make_fm


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one of the nine acceptance criteria")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_acceptance", None)
    if marker is None:
        return
    number, title = marker
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["ok"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        rep._acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        verdict = "PASS" if e["ok"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {e['title']}")
