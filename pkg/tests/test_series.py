import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterindex.series import (
    DataError,
    SchemeError,
    SchemeWarning,
    Series,
    compute_norms,
    exceedance_count,
    order_statistic,
    read_csv,
    validate_scheme,
    write_csv,
)
from clusterindex.simulate import pareto_sample


def test_univariate_norms_are_absolute_values():
    for kind in ("euclidean", "sup", "l1"):
        np.testing.assert_array_equal(compute_norms([-2.0, 3.0], kind), [2.0, 3.0])


@pytest.mark.parametrize("kind,expected", [("euclidean", 5.0), ("sup", 4.0), ("l1", 7.0)])
def test_bivariate_norms(kind, expected):
    assert compute_norms([[3.0, 4.0]], kind)[0] == expected


def test_non_finite_point_is_rejected_with_its_index():
    with pytest.raises(DataError, match="point 2"):
        compute_norms([[1.0, 2.0], [0.0, 1.0], [np.nan, 1.0]])


def test_series_is_immutable():
    s = Series([[1.0, 2.0], [3.0, 4.0]])
    assert s.n == 2 and s.dim == 2
    np.testing.assert_allclose(s.norms, [np.sqrt(5), 5.0])
    with pytest.raises(ValueError):
        s.points[0, 0] = 7.0
    with pytest.raises(DataError):
        _ = s.values


def test_order_statistic_examples():
    assert order_statistic([3, 1, 4, 1, 5], 2).value == 3
    assert order_statistic([1, 2, 3], 1).value == 2
    thr = order_statistic([1, 2, 3], 1)
    assert thr.origin == "order-statistic" and thr.k == 1


def test_order_statistic_rejects_k_ge_n():
    with pytest.raises(SchemeError):
        order_statistic([1.0, 2.0], 2)


def test_order_statistic_pareto_quantile():
    x = pareto_sample(1.0, np.random.default_rng(11), 100_000)
    # P(X > 100) = 0.01, so the 1000 largest sit above ~100
    assert order_statistic(x, 1000).value == pytest.approx(100.0, rel=0.05)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=2, max_size=60), st.data())
def test_order_statistic_matches_full_sort(values, data):
    k = data.draw(st.integers(1, len(values) - 1))
    thr = order_statistic(values, k).value
    assert thr == sorted(values)[len(values) - k - 1]
    above = exceedance_count(values, thr) if thr > 0 else sum(v > 0 for v in values)
    assert above <= k
    if len(set(values)) == len(values) and thr > 0:
        assert above == k


def test_validate_scheme_arithmetic():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        scheme = validate_scheme(1000, 20, 50)
    assert (scheme.m_n, scheme.q_n) == (50, 981)


@pytest.mark.parametrize("args", [(10, 20, 2), (10, 0, 2), (10, 2, 10), (10, 2, 0)])
def test_validate_scheme_errors(args):
    with pytest.raises(SchemeError):
        validate_scheme(*args)


def test_validate_scheme_warns_on_long_blocks():
    with pytest.warns(SchemeWarning, match="r_n/n"):
        validate_scheme(1000, 200, 20)


def test_csv_round_trip(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1.5,2\n-3,4e2\n")
    s = read_csv(path)
    np.testing.assert_array_equal(s.points, [[1.5, 2.0], [-3.0, 400.0]])
    out = tmp_path / "y.csv"
    write_csv(s, out)
    np.testing.assert_array_equal(read_csv(out).points, s.points)


def test_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(DataError, match="line 2"):
        read_csv(path)
