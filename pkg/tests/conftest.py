import sys

import numpy as np
import pytest

from specialk.kernels import available_backends


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    return available_backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(num))
