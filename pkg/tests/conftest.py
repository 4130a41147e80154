from __future__ import annotations

import time
from fractions import Fraction

import pytest

from weylwit.exact import GaussRational

_ACCEPTANCE: dict[int, dict] = {}


def frac(x) -> Fraction:
    """Exact rational value of an int, mpq or real GaussRational."""
    if isinstance(x, GaussRational):
        assert x.im == 0, f"expected a real value, got {x}"
        x = x.re
    return Fraction(int(x.numerator), int(x.denominator)) if not isinstance(x, int) else Fraction(x)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title, limit): numbered acceptance criterion")


@pytest.fixture
def stopwatch(request):
    """Yields a callable returning elapsed seconds; records the timing for acceptance tests."""
    start = time.perf_counter()
    yield lambda: time.perf_counter() - start
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None:
        _ACCEPTANCE.setdefault(marker.args[0], {})["seconds"] = time.perf_counter() - start


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title, limit = marker.args
    entry = _ACCEPTANCE.setdefault(number, {})
    entry.update(title=title, limit=limit, passed=call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        if "title" not in e:
            continue
        status = "PASS" if e["passed"] else "FAIL"
        timing = f"{e.get('seconds', float('nan')):.1f} s" + (f" (limit {e['limit']} s)" if e["limit"] else "")
        terminalreporter.write_line(f"[{status}] criterion {number}: {e['title']} -- {timing}")
