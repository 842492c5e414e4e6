from fractions import Fraction

import numpy as np
import pytest

from clusterindex.functionals import (
    CLUSTER_SIZE,
    EXC,
    EXTREMAL,
    LARGE_DEV,
    RUIN,
    STOP_LOSS,
    FunctionalSpec,
    ScaledBlock,
    evaluate,
)
from clusterindex.series import Series

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


ALL_FUNCTIONALS = (
    FunctionalSpec(EXC),
    FunctionalSpec(EXTREMAL),
    FunctionalSpec(CLUSTER_SIZE, m=2),
    FunctionalSpec(STOP_LOSS, eta=1.5),
    FunctionalSpec(LARGE_DEV),
    FunctionalSpec(RUIN),
)


def brute_sliding(functional, series, r, s):
    """Double loop: evaluate every window explicitly."""
    return sum(evaluate(functional, ScaledBlock(series, i, r, s)) for i in range(series.n - r + 1))


def brute_disjoint(functional, series, r, s):
    return sum(evaluate(functional, ScaledBlock(series, i * r, r, s)) for i in range(series.n // r))


def exact_h(functional, block, s):
    """Cluster functional on a univariate block in exact rational arithmetic."""
    x = [Fraction(float(v)) / Fraction(float(s)) for v in block]
    kind = functional.kind
    if kind == EXC:
        return sum(1 for v in x if abs(v) > 1)
    if kind == EXTREMAL:
        return int(max(abs(v) for v in x) > 1)
    if kind == CLUSTER_SIZE:
        return int(sum(1 for v in x if abs(v) > 1) == functional.m)
    if kind == STOP_LOSS:
        return int(sum(max(v - 1, 0) for v in x) > Fraction(functional.eta))
    if kind == LARGE_DEV:
        return int(max(sum(x), 0) > 1)
    partial, best = Fraction(0), Fraction(0)
    for v in x:
        partial += v
        best = max(best, partial)
    return int(best > 1)


def random_univariate(rng, n, ties=False):
    """Signed heavy-tailed values; ``ties`` rounds them to force repeats."""
    x = (1.0 - rng.random(n)) ** (-1.0 / rng.uniform(0.7, 2.5))
    x *= np.where(rng.random(n) < 0.7, 1.0, -1.0)
    x *= rng.uniform(0.1, 1.0)
    if ties:
        x = np.round(x)
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def toy_series():
    return Series.from_values([5, 0.1, 0.2, 6, 0.3])
