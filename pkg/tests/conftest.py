import numpy as np
import pytest

from bilinear.field import get_field
from bilinear.spaces import bilinear_space


def make_space(q, n, m):
    return bilinear_space(get_field(q), n, m)


@pytest.fixture
def s22():
    return make_space(2, 2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
