import numpy as np
import pytest

from tailrisk import Series


def pareto(gamma, n, seed):
    """Exact Pareto sample with survival x**(-1/gamma) on x >= 1."""
    rng = np.random.default_rng(seed)
    return Series(rng.random(n) ** (-gamma))


@pytest.fixture
def pareto_sample():
    return pareto


def pareto_expectile(gamma, tail):
    """Exact tau-expectile of the Pareto law with survival x**(-1/gamma), x >= 1.

    With ``a = 1/gamma`` the first-order condition reduces to
    ``(2 tau - 1) E(Y - xi)_+ = (1 - tau)(xi - E Y)`` where
    ``E(Y - xi)_+ = xi**(1 - a) / (a - 1)`` and ``E Y = a / (a - 1)``.
    """
    from scipy.optimize import brentq

    a = 1.0 / gamma
    mean = a / (a - 1.0)
    tau = 1.0 - tail

    def foc(xi):
        return (2 * tau - 1) * xi ** (1 - a) / (a - 1) - tail * (xi - mean)

    return brentq(foc, mean, 1e30, xtol=1e-14, rtol=1e-15)


def pareto_gamma_e(gamma, tail):
    """Population value of the expectile-based tail index at level ``1 - tail``."""
    xi = pareto_expectile(gamma, tail)
    return 1.0 / (1.0 + xi ** (-1.0 / gamma) / tail)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
