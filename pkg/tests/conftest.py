import numpy as np
import pytest

from goodwin_gpd.reference import REFERENCE_FITS, reference_params

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def p2002():
    return reference_params(2002)


@pytest.fixture
def p2019():
    return reference_params(2019)


@pytest.fixture(params=[r.year for r in REFERENCE_FITS], ids=str)
def ref_row(request):
    return next(r for r in REFERENCE_FITS if r.year == request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
