import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterindex.functionals import (
    CLUSTER_SIZE,
    EXC,
    EXTREMAL,
    LARGE_DEV,
    RUIN,
    STOP_LOSS,
    DimensionError,
    FunctionalSpec,
    ScaledBlock,
    ScaleError,
    disjoint_sum,
    evaluate,
    evaluate_paths,
    parse_functional,
    sliding_max,
    sliding_sum,
    window_weights,
)
from clusterindex.series import Series, exceedance_count

from conftest import ALL_FUNCTIONALS, brute_disjoint, brute_sliding, exact_h, random_univariate

EXTREMAL_F = FunctionalSpec(EXTREMAL)


@pytest.mark.parametrize(
    "functional,block,expected",
    [
        (FunctionalSpec(EXC), [0.5, 1.5, 2.0], 2),
        (FunctionalSpec(EXTREMAL), [0.5, 1.5, 2.0], 1),
        (FunctionalSpec(EXTREMAL), [0.5, -1.5], 1),
        (FunctionalSpec(EXTREMAL), [1.0, 0.2], 0),
        (FunctionalSpec(CLUSTER_SIZE, m=2), [0.5, 1.5, 2.0], 1),
        (FunctionalSpec(CLUSTER_SIZE, m=1), [0.5, 1.5, 2.0], 0),
        (FunctionalSpec(STOP_LOSS, eta=1.0), [0.5, 1.5, 2.0], 1),
        (FunctionalSpec(STOP_LOSS, eta=1.5), [0.5, 1.5, 2.0], 0),
        (FunctionalSpec(LARGE_DEV), [0.6, 0.6], 1),
        (FunctionalSpec(LARGE_DEV), [2.0, -1.5], 0),
        (FunctionalSpec(RUIN), [2.0, -1.5], 1),
        (FunctionalSpec(RUIN), [0.6, -0.5, 0.6], 0),
        (FunctionalSpec(RUIN), [0.6, -0.1, 0.6], 1),
    ],
)
def test_evaluate_examples(functional, block, expected):
    assert evaluate(functional, block) == expected


def test_stop_loss_is_strict_at_the_level():
    assert evaluate(FunctionalSpec(STOP_LOSS, eta=1.5), [2.5]) == 0
    assert evaluate(FunctionalSpec(STOP_LOSS, eta=1.5), [2.5], scale=1.0) == 0


def test_scale_divides_first():
    assert evaluate(FunctionalSpec(EXC), [5.0, 0.1, 6.0], scale=3.0) == 2
    assert evaluate(FunctionalSpec(EXC), [5.0, 0.1, 6.0], scale=6.0) == 0


def test_multivariate_norm_functionals():
    block = [[0.8, 0.8], [0.1, 0.1]]
    assert evaluate(EXTREMAL_F, block, norm_kind="euclidean") == 1
    assert evaluate(EXTREMAL_F, block, norm_kind="sup") == 0
    with pytest.raises(DimensionError):
        evaluate(FunctionalSpec(RUIN), block)
    with pytest.raises(DimensionError):
        sliding_sum(FunctionalSpec(STOP_LOSS, eta=1), Series(block), 1, 1.0)


def test_bad_scale_and_block():
    s = Series.from_values([1.0, 2.0])
    with pytest.raises(ScaleError):
        ScaledBlock(s, 0, 1, 0.0)
    with pytest.raises(ValueError):
        ScaledBlock(s, 1, 2)
    with pytest.raises(ScaleError):
        sliding_sum(EXTREMAL_F, s, 1, -1.0)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("exc", FunctionalSpec(EXC)),
        ("cluster-size:m=3", FunctionalSpec(CLUSTER_SIZE, m=3)),
        ("stop-loss:eta=1.5", FunctionalSpec(STOP_LOSS, eta=1.5)),
        (" ruin ", FunctionalSpec(RUIN)),
    ],
)
def test_parse_functional(text, expected):
    assert parse_functional(text) == expected
    assert parse_functional(str(expected)) == expected


@pytest.mark.parametrize("text", ["cluster-size", "cluster-size:m=0", "stop-loss:eta=-1", "exc:m=1", "bogus",
                                  "extremal:x=1"])
def test_parse_functional_rejects(text):
    with pytest.raises(ValueError):
        parse_functional(text)


def test_functional_classes():
    assert [f.functional_class for f in ALL_FUNCTIONALS] == ["exc", "A", "A", "A", "B", "B"]
    assert [f.requires_ansjb for f in ALL_FUNCTIONALS] == [False] * 4 + [True] * 2


def test_evaluate_paths_matches_evaluate(rng):
    paths = rng.normal(scale=1.2, size=(50, 7))
    for f in ALL_FUNCTIONALS:
        expected = [evaluate(f, row) for row in paths]
        np.testing.assert_array_equal(evaluate_paths(f, paths), expected)


def test_evaluate_agrees_with_exact_arithmetic(rng):
    for trial in range(300):
        block = random_univariate(rng, int(rng.integers(1, 12)), ties=trial % 3 == 0)
        s = float(rng.uniform(0.3, 3.0))
        for f in ALL_FUNCTIONALS:
            assert evaluate(f, block, scale=s) == exact_h(f, block, s), (f, block.tolist(), s)


def test_window_weights_example():
    np.testing.assert_array_equal(window_weights(5, 2), [1, 2, 2, 2, 1])
    np.testing.assert_array_equal(window_weights(4, 4), [1, 1, 1, 1])


def test_sliding_max():
    np.testing.assert_array_equal(sliding_max([1, 3, 2, 5, 4, 1], 3), [3, 5, 5, 5])
    np.testing.assert_array_equal(sliding_max([2, 2, 1], 1), [2, 2, 1])


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=40), st.data())
def test_sliding_max_matches_brute_force(values, data):
    w = data.draw(st.integers(1, len(values)))
    expected = [max(values[i:i + w]) for i in range(len(values) - w + 1)]
    np.testing.assert_array_equal(sliding_max(values, w), expected)


@pytest.mark.parametrize("functional", ALL_FUNCTIONALS, ids=str)
@pytest.mark.parametrize("ties", [False, True])
def test_sliding_and_disjoint_equal_brute_force(functional, ties, rng):
    for _ in range(25):
        n = int(rng.integers(5, 200))
        r = int(rng.integers(1, min(n, 25) + 1))
        x = random_univariate(rng, n, ties=ties)
        series = Series.from_values(x)
        s = float(np.quantile(series.norms, rng.uniform(0.5, 0.99)))
        if s <= 0:
            s = 1.0
        assert sliding_sum(functional, series, r, s) == brute_sliding(functional, series, r, s)
        assert disjoint_sum(functional, series, r, s) == brute_disjoint(functional, series, r, s)


def test_ruin_and_large_dev_near_ties_are_exact():
    # window sums land on the boundary only up to rounding
    x = np.array([0.1] * 10 + [0.7, 0.2, 0.1] * 20 + [1e8, -1e8] * 3 + [0.3, 0.7, 0.0] * 10)
    series = Series.from_values(x)
    for f in (FunctionalSpec(LARGE_DEV), FunctionalSpec(RUIN), FunctionalSpec(STOP_LOSS, eta=0.1)):
        for r in (1, 2, 3, 5, 10, 11):
            for s in (1.0, 0.5, 0.25, 0.1):
                assert sliding_sum(f, series, r, s) == brute_sliding(f, series, r, s)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=3, max_size=40), st.data())
def test_sliding_brute_force_property(values, data):
    series = Series.from_values(values)
    r = data.draw(st.integers(1, len(values)))
    s = data.draw(st.sampled_from([0.5, 1.0, 2.0, 3.0]))
    for f in ALL_FUNCTIONALS:
        assert sliding_sum(f, series, r, s) == brute_sliding(f, series, r, s)


def test_weight_identity_sliding_exc_equals_weighted_exceedances(rng):
    for _ in range(20):
        n = int(rng.integers(10, 300))
        r = int(rng.integers(1, n + 1))
        series = Series.from_values(random_univariate(rng, n))
        s = float(np.median(series.norms))
        mask = series.norms / s > 1.0
        weighted = int(np.dot(window_weights(n, r), mask))
        assert sliding_sum(FunctionalSpec(EXC), series, r, s) == weighted
        # discrepancy with the plain count over 1..q_n is confined to the edges
        plain = exceedance_count(series.norms[: n - r + 1], s)
        assert abs(weighted / r - plain) <= 2 * r


@pytest.mark.parametrize("lam", [0.5, 2.0, 8.0, 0.125])
def test_scaling_consistency_bivariate_powers_of_two(lam, rng):
    pts = rng.standard_cauchy(size=(120, 2))
    base, scaled = Series(pts), Series(pts * lam)
    s = float(np.quantile(base.norms, 0.9))
    for f in (FunctionalSpec(EXC), EXTREMAL_F, FunctionalSpec(CLUSTER_SIZE, m=1)):
        assert sliding_sum(f, scaled, 7, lam * s) == sliding_sum(f, base, 7, s)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False, allow_subnormal=False), min_size=2, max_size=30),
       st.floats(0.01, 100), st.floats(0.1, 10))
def test_scaling_consistency_univariate(values, lam, s):
    base = Series.from_values(values)
    scaled = Series.from_values(np.asarray(values) * lam)
    f = EXTREMAL_F
    # lambda*x / (lambda*s) may round differently from x/s; compare against the
    # block evaluation on the scaled data itself, which is the invariant users see
    assert sliding_sum(f, scaled, 2, lam * s) == brute_sliding(f, scaled, 2, lam * s)
    if lam in (0.5, 2.0, 4.0):
        assert sliding_sum(f, scaled, 2, lam * s) == sliding_sum(f, base, 2, s)


def test_zero_padding_invariance(rng):
    x = random_univariate(rng, 12)
    for f in ALL_FUNCTIONALS:
        padded = np.concatenate((np.zeros(5), x, np.zeros(4)))
        assert evaluate(f, padded, scale=0.7) == evaluate(f, x, scale=0.7)


def test_indicator_monotone_in_scale(rng):
    x = np.abs(random_univariate(rng, 30))
    for f in (EXTREMAL_F, FunctionalSpec(STOP_LOSS, eta=0.5), FunctionalSpec(LARGE_DEV), FunctionalSpec(RUIN)):
        vals = [evaluate(f, x, scale=s) for s in np.geomspace(0.01, 1e3, 60)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_disjoint_drops_the_tail():
    series = Series.from_values([0, 0, 0, 0, 9.0])
    assert disjoint_sum(EXTREMAL_F, series, 2, 1.0) == 0
    assert sliding_sum(EXTREMAL_F, series, 2, 1.0) == 1
