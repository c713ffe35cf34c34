"""Brute-force oracles shared by the tests.

These evaluate Hamiltonians and kernels straight from pair sums with Python
loops and itertools, independently of the vectorised package code.
"""

import itertools
import math

import pytest


def J_power(p):
    return lambda a, b: abs(a - b) ** -p


def brute_log_weight(J, beta, sites, sigma, outside):
    """beta * (sum over pairs inside + sum over pairs window-outside) of J w w.

    ``outside`` maps site -> spin for every exterior site kept.
    """
    total = 0.0
    for x in range(len(sites)):
        for y in range(x + 1, len(sites)):
            total += J(sites[x], sites[y]) * sigma[x] * sigma[y]
        for s, w in outside.items():
            total += J(sites[x], s) * sigma[x] * w
    return beta * total


def brute_kernel(J, beta, sites, outside):
    """Dict config-tuple -> probability, enumerated with itertools.product."""
    weights = {}
    for sigma in itertools.product((-1, 1), repeat=len(sites)):
        weights[sigma] = brute_log_weight(J, beta, sites, sigma, outside)
    top = max(weights.values())
    Z = sum(math.exp(v - top) for v in weights.values())
    return {k: math.exp(v - top) / Z for k, v in weights.items()}


def plus_tail(first, last):
    return {s: 1 for s in range(first, last + 1)}


@pytest.fixture
def oracle():
    class O:
        log_weight = staticmethod(brute_log_weight)
        kernel = staticmethod(brute_kernel)
        power = staticmethod(J_power)
        tail = staticmethod(plus_tail)
    return O


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion; printed at the end of the run."""
    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
