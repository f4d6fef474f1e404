import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(number, ok, seconds, limit, note)."""
    def record(number, ok, seconds, limit, note=""):
        cap = f"limit {limit}s" if limit is not None else "no time limit"
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} {seconds:.2f}s / {cap} {note}".rstrip()
        request.config.stash[_ACCEPTANCE].append((number, line))
        print(line)
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
