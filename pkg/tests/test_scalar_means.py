import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pconcave_app.convex_geom import square
from pconcave_app.errors import ArgumentError
from pconcave_app.field import discretize
from pconcave_app.scalar_means import (
    PMeanSpec,
    bbl_exponent,
    beta_from_p,
    corollary_exponent,
    is_p_concave,
    laplacian_corollary_exponent,
    p_from_beta,
    p_mean,
    p_mean_array,
    p_mean_multi,
)

values = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
weights = st.floats(min_value=0.01, max_value=0.99)
exponents = st.sampled_from([-math.inf, -2.0, -0.5, 0.0, 1.0 / 3.0, 0.5, 1.0, 2.0, math.inf])


def test_p_mean_branches():
    assert p_mean(1.0, 4.0, 0.5, 1.0) == pytest.approx(2.5)
    assert p_mean(1.0, 4.0, 0.5, 0.0) == pytest.approx(2.0)
    assert p_mean(1.0, 4.0, 0.5, math.inf) == 4.0
    assert p_mean(1.0, 4.0, 0.5, -math.inf) == 1.0
    assert p_mean(1.0, 4.0, 0.5, -1.0) == pytest.approx(1.6)


def test_p_mean_zero_rule():
    assert p_mean(0.0, 4.0, 0.5, -1.0) == 0.0
    assert p_mean(0.0, 4.0, 0.5, 0.0) == 0.0
    assert p_mean(0.0, 4.0, 0.25, 1.0) == pytest.approx(1.0)
    assert p_mean(0.0, 4.0, 0.5, 0.5) == pytest.approx(1.0)


def test_p_mean_rejects_bad_arguments():
    with pytest.raises(ArgumentError):
        p_mean(-1.0, 1.0, 0.5, 1.0)
    with pytest.raises(ArgumentError):
        p_mean(1.0, 1.0, 1.5, 1.0)


@settings(max_examples=100, deadline=None)
@given(a=values, b=values, mu=weights, p=exponents, q=exponents)
def test_p_mean_is_monotone_in_p(a, b, mu, p, q):
    low, high = sorted((p, q))
    assert p_mean(a, b, mu, low) <= p_mean(a, b, mu, high) * (1.0 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(a=values, b=values, mu=weights, p=exponents)
def test_p_mean_between_min_and_max(a, b, mu, p):
    value = p_mean(a, b, mu, p)
    assert min(a, b) * (1.0 - 1e-12) <= value <= max(a, b) * (1.0 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(a=values, b=values, mu=weights, p=exponents, c=st.floats(min_value=1e-2, max_value=1e2))
def test_p_mean_is_homogeneous(a, b, mu, p, c):
    assert p_mean(c * a, c * b, mu, p) == pytest.approx(c * p_mean(a, b, mu, p), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(a=values, mu=weights, p=exponents)
def test_p_mean_of_equal_values_is_that_value(a, mu, p):
    assert p_mean(a, a, mu, p) == pytest.approx(a, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(min_value=0.5, max_value=2.0), b=st.floats(min_value=0.5, max_value=2.0), mu=weights)
def test_p_mean_is_continuous_in_p(a, b, mu):
    geometric = p_mean(a, b, mu, 0.0)
    assert p_mean(a, b, mu, 1e-7) == pytest.approx(geometric, rel=1e-6)
    assert p_mean(a, b, mu, -1e-7) == pytest.approx(geometric, rel=1e-6)
    assert p_mean(a, b, mu, 1000.0) == pytest.approx(max(a, b), rel=1e-2)
    assert p_mean(a, b, mu, -1000.0) == pytest.approx(min(a, b), rel=1e-2)


@settings(max_examples=50, deadline=None)
@given(a=values, b=values, mu=weights, p=exponents)
def test_binary_multi_mean_matches_p_mean_exactly(a, b, mu, p):
    assert p_mean_multi([a, b], PMeanSpec.binary(mu, p)) == p_mean(a, b, mu, p)


@settings(max_examples=50, deadline=None)
@given(mu=weights, p=exponents)
def test_vectorised_mean_agrees_with_scalar(mu, p):
    a = np.array([0.0, 0.5, 2.0, 7.0])
    b = np.array([3.0, 0.0, 2.0, 0.25])
    expected = [p_mean(x, y, mu, p) for x, y in zip(a, b)]
    assert np.allclose(p_mean_array(a, b, mu, p), expected, rtol=1e-12, atol=0.0)


def test_equal_weights_sum_to_one():
    spec = PMeanSpec.equal(7, 0.5)
    assert spec.m == 7
    assert sum(spec.weights) == pytest.approx(1.0, abs=1e-15)
    assert p_mean_multi([2.0] * 7, spec) == pytest.approx(2.0)


def test_weight_validation():
    with pytest.raises(ArgumentError):
        PMeanSpec(p=1.0, weights=(0.5, 0.6))
    with pytest.raises(ArgumentError):
        PMeanSpec(p=1.0, weights=(1.0, 0.0))
    with pytest.raises(ArgumentError):
        PMeanSpec.binary(1.0, 0.5)


def test_corollary_exponent():
    assert corollary_exponent(0.5, 2.0, 2) == pytest.approx(1.0 / 3.0)
    assert corollary_exponent(0.5, math.inf, 2) == 0.5
    assert corollary_exponent(0.0, 1.0, 2) == 0.0
    with pytest.raises(ArgumentError):
        corollary_exponent(0.5, 0.0, 2)


def test_bbl_exponent():
    assert bbl_exponent(math.inf, 2) == 0.5
    assert bbl_exponent(-0.5, 2) == -math.inf
    assert bbl_exponent(1.0, 2) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ArgumentError):
        bbl_exponent(-1.0, 2)


def test_beta_exponent_conversions():
    assert p_from_beta(math.inf) == 0.5
    assert p_from_beta(2.0) == pytest.approx(0.4)
    assert beta_from_p(0.4) == pytest.approx(2.0)
    assert beta_from_p(0.5) == math.inf
    assert laplacian_corollary_exponent(2.0, 2.0, 2) == pytest.approx(2.0 / 7.0)
    with pytest.raises(ArgumentError):
        p_from_beta(0.5)


def _field(function, h=0.125):
    gf = discretize(square(1.0), h)
    points = gf.node_points()
    return gf.with_values(function(points[..., 0], points[..., 1]))


def test_log_concave_product_passes():
    gf = _field(lambda x, y: (1.0 - x * x) * (1.0 - y * y))
    result = is_p_concave(gf, 0.0)
    assert result.passed
    assert result.pairs > 0
    assert result.witness is None


def test_convex_bump_fails_with_witness():
    gf = _field(lambda x, y: x * x + y * y)
    result = is_p_concave(gf, 1.0)
    assert not result
    assert result.min_slack < 0.0
    first, second = result.witness
    assert len(first) == 2 and len(second) == 2


def test_concave_field_is_quasi_concave():
    gf = _field(lambda x, y: 2.0 - x * x - y * y)
    assert is_p_concave(gf, 1.0).passed
    assert is_p_concave(gf, -math.inf).passed
