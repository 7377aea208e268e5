import importlib

import numpy as np
import pytest

from cayleynet import _pykernels, linalg

_BACKENDS = {"python": _pykernels}
try:
    _BACKENDS["cython"] = importlib.import_module("cayleynet._ckernels")
except ImportError:
    pass


@pytest.fixture(params=sorted(_BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    monkeypatch.setattr(linalg, "kernels", _BACKENDS[request.param])
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
