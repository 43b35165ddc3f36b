import sys
import numpy as np
import pytest

from overlay_scout.ingest import DelaySeries, Hop, TracerouteRecord


def rec(src, dst, addresses, ts=0, asns=None):
    """Traceroute record from a list of hop addresses (None = unresponsive)."""
    asns = asns or [None] * len(addresses)
    hops = [Hop(i, a, n) for i, (a, n) in enumerate(zip(addresses, asns), start=1)]
    return TracerouteRecord(ts, src, dst, hops)


def series(src, dst, values, start=0, epoch_len=60):
    return DelaySeries(src, dst, epoch_len, start, np.asarray(values, dtype=float))


@pytest.fixture
def make_rec():
    return rec


@pytest.fixture
def make_series():
    return series


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
