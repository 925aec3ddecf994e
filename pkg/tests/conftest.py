import os

import pytest
from hypothesis import HealthCheck, settings

from sagin import kernels

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def _backends():
    out = [pytest.param(kernels.python_backend, id="python")]
    if kernels.compiled_backend is not None:
        out.append(pytest.param(kernels.compiled_backend, id="compiled"))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
