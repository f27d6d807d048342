import mpmath as mp
import pytest
from hypothesis import settings

from miop.numeric import DEFAULT_BITS, GUARD_BITS

settings.register_profile("miop", max_examples=25, deadline=None)
settings.load_profile("miop")

WORK_PREC = DEFAULT_BITS + GUARD_BITS


@pytest.fixture(autouse=True)
def working_precision():
    with mp.workprec(WORK_PREC):
        yield


def tiny(bits):
    """2^-bits as an mpf."""
    return mp.ldexp(mp.mpf(1), -bits)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
