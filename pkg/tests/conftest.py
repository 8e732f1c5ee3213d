import math

import pytest

ACCEPTANCE_LINES = []


def trial_division_primes(limit):
    return [m for m in range(2, limit + 1) if all(m % d for d in range(2, math.isqrt(m) + 1))]


def direct_totient(limit):
    """phi(m) for m <= limit by an independent sieve over divisors."""
    phi = list(range(limit + 1))
    for p in range(2, limit + 1):
        if phi[p] == p:
            for k in range(p, limit + 1, p):
                phi[k] -= phi[k] // p
    return phi


@pytest.fixture(scope="session")
def small_primes_list():
    return trial_division_primes(10**4)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("#")[1].split()[0])):
            terminalreporter.write_line(line)
