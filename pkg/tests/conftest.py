import numpy as np
import pytest

from jamllr.channel import ChannelParams


@pytest.fixture
def ref_params():
    """SNR_A = 12 dB, jammed-state variance 1, b = 0.01, g = 0.25."""
    s2a = 10 ** -1.2
    return ChannelParams(sigma2_a=s2a, sigma2_v=1.0 - s2a, b=0.01, g=0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def report(request, capsys):
    """Record and print one pass/fail line for an acceptance criterion."""

    def _report(name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
