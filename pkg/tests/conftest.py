import random

import pytest

from deltahecke.qseries import LaurentSeries, divisor_sum_coeffs, EigenSystem


def rand_series(rng: random.Random, p: int, low: int, high: int, prec: int,
                density: float = 0.6) -> LaurentSeries:
    """Random series with coefficients on [low, high] and precision prec."""
    terms = {e: rng.randrange(1, p) for e in range(low, high + 1) if rng.random() < density}
    return LaurentSeries(p, terms, prec, min(low, prec))


@pytest.fixture(scope="session")
def divisor_sum_data():
    """Divisor-sum data at p = 5, N = 11, kappa = 0 (coefficients to 300)."""
    p, N = 5, 11
    a = divisor_sum_coeffs(N, 300)
    sysm = EigenSystem.from_coeffs(a, p, N, 0)
    return p, N, a, sysm


def coeff_series(a, p, prec):
    return LaurentSeries(p, {n: a(n) for n in range(1, prec)}, prec)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
