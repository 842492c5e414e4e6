import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterindex.simulate import (
    ProcessSpec,
    default_burn_in,
    generate,
    generate_values,
    parse_model,
    parse_process,
    pareto_from_uniform,
    pareto_sample,
)


@pytest.mark.parametrize("alpha,expected", [(1.0, 4.0), (2.0, 2.0), (0.5, 16.0)])
def test_pareto_inverse_cdf(alpha, expected):
    assert pareto_from_uniform(0.25, alpha) == pytest.approx(expected)


def test_pareto_tail_frequency():
    x = pareto_sample(1.0, np.random.default_rng(1), 200_000)
    assert x.min() >= 1.0
    assert np.mean(x > 10) == pytest.approx(0.1, abs=0.003)


def test_pareto_rejects_bad_alpha():
    with pytest.raises(ValueError):
        pareto_sample(0.0, np.random.default_rng(0), 3)


def test_default_burn_in():
    b = default_burn_in(0.5)
    assert 0.5 ** b < 1e-12 <= 0.5 ** (b - 1)


@pytest.mark.parametrize("rho", [0.2, 0.5, 0.9])
def test_ar1_recursion_holds(rho):
    x = generate_values(ProcessSpec("ar1", alpha=1.0, n=5000, rho=rho, seed=2))
    z = x[1:] - rho * x[:-1]
    # the innovations are Pareto, so at least one up to rounding
    assert np.all(z >= 1.0 - 1e-9 * np.abs(x[1:]).max())


def test_ma_is_a_moving_sum():
    spec = ProcessSpec("ma", alpha=1.5, n=50, coeffs=(1.0, 0.7), seed=4)
    rng = np.random.default_rng(4)
    z = pareto_sample(1.5, rng, 51)
    np.testing.assert_allclose(generate_values(spec), z[1:] + 0.7 * z[:-1])


@pytest.mark.parametrize("text", ["iid:alpha=2", "ar1:rho=0.5,alpha=1", "ma1:b=0.7,alpha=1.5",
                                  "ma:coeffs=1|0.5|0.25,alpha=1"])
def test_generation_is_deterministic(text):
    a = generate(parse_process(text, n=300, seed=9))
    b = generate(parse_process(text, n=300, seed=9))
    c = generate(parse_process(text, n=300, seed=10))
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


@pytest.mark.parametrize("text", ["iid:alpha=2", "ar1:rho=0.5,alpha=1", "ma1:b=0.7,alpha=1.5",
                                  "ma:coeffs=1|0.5|0.25,alpha=1"])
def test_describe_round_trips(text):
    spec = parse_process(text)
    assert parse_process(spec.describe()) == spec


@pytest.mark.parametrize("text", ["ar1:alpha=1", "ma1:alpha=1", "garch:alpha=1", "iid:rho=0.5", "iid:alpha"])
def test_parse_model_rejects(text):
    with pytest.raises(ValueError):
        parse_model(text)


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="ar1", alpha=1.0), dict(kind="ar1", alpha=1.0, rho=1.0), dict(kind="iid", alpha=-1.0),
     dict(kind="ma", alpha=1.0, coeffs=(0.5, 1.0)), dict(kind="ar1", alpha=1.0, rho=0.5, burn_in=3)],
)
def test_process_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ProcessSpec(**kwargs)


@pytest.mark.parametrize("text,alpha", [("ar1:rho=0.5,alpha=1", 1.0), ("ma1:b=0.7,alpha=1.5", 1.5)])
def test_marginal_tail_is_regularly_varying(text, alpha):
    x = generate(parse_process(text, n=400_000, seed=5)).norms
    u = np.quantile(x, 0.99)
    ratio = np.mean(x > 2 * u) / np.mean(x > u)
    assert ratio == pytest.approx(2.0 ** -alpha, rel=0.1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_ar1_values_at_least_one_over_one_minus_rho_floor(seed, rho):
    x = generate_values(ProcessSpec("ar1", alpha=1.0, n=200, rho=rho, seed=seed))
    # X_t = sum rho^j Z_{t-j} with Z >= 1 over a long burn-in
    assert x.min() >= (1.0 - 1e-9) / (1.0 - rho) - 1e-9
