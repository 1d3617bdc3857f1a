import itertools
import sys

import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def brute_layer(n, k):
    """Layer members as tuples of frozensets, built with itertools only."""
    per_part = [[frozenset(c) for c in itertools.combinations(range(1, ns + 1), ks)] for ns, ks in zip(n, k)]
    return [tuple(m) for m in itertools.product(*per_part)]


def brute_intersects(a, b):
    return any(x & y for x, y in zip(a, b))


@pytest.fixture
def layer():
    return brute_layer


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
