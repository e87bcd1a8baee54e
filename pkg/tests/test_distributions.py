import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from sdbf import distributions as dist
from sdbf.errors import ParameterError

from oracles import student_t_pdf_mp

FAMILIES = [
    dist.cauchy(0, 1),
    dist.cauchy(0.5, 0.3),
    dist.half_cauchy(1),
    dist.half_cauchy(2.5),
    dist.normal(0, 1),
    dist.normal(-1, math.sqrt(0.3)),
    dist.student_t(1),
    dist.student_t(3.5, 0.2, 1.7),
    dist.student_t(30),
]


def test_cauchy_pdf_values():
    c = dist.cauchy(0, 1)
    assert dist.pdf(c, 0.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert dist.pdf(c, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert dist.pdf(c, 0.0) == pytest.approx(0.3183099, abs=1e-7)
    assert dist.pdf(c, 1.0) == pytest.approx(0.1591549, abs=1e-7)


def test_student_t_one_dof_is_cauchy_at_zero():
    assert dist.pdf(dist.student_t(1), 0.0) == pytest.approx(1 / math.pi, rel=1e-14)


def test_student_t_large_dof_matches_gamma_formula():
    oracle = student_t_pdf_mp(0.0, 10000)
    assert oracle == pytest.approx(0.39894, abs=1e-4)
    assert dist.pdf(dist.student_t(10000), 0.0) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("x", [-3.0, -0.4, 0.0, 1.3, 7.0])
@pytest.mark.parametrize("dof", [2.0, 9.0, 1e6])
def test_student_t_against_mpmath(x, dof):
    assert dist.pdf(dist.student_t(dof), x) == pytest.approx(student_t_pdf_mp(x, dof), rel=1e-11)


def test_half_cauchy_density():
    hc = dist.half_cauchy(1)
    assert dist.pdf(hc, -0.1) == 0.0
    for x in (0.0, 0.5, 3.0):
        assert dist.pdf(hc, x) == pytest.approx(2 * dist.pdf(dist.cauchy(0, 1), x), rel=1e-15)


@pytest.mark.parametrize("params", FAMILIES, ids=str)
def test_pdf_normalises(params):
    lo = 0.0 if params.family is dist.Family.HALF_CAUCHY else -np.inf
    total, err = integrate.quad(lambda x: dist.pdf(params, x), lo, np.inf, epsabs=1e-12, limit=500)
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("params", FAMILIES, ids=str)
def test_cdf_derivative_is_pdf(params):
    xs = np.linspace(-4, 4, 41)
    if params.family is dist.Family.HALF_CAUCHY:
        xs = xs[xs > 0.05]
    h = 1e-5
    fd = (dist.cdf(params, xs + h) - dist.cdf(params, xs - h)) / (2 * h)
    np.testing.assert_allclose(fd, dist.pdf(params, xs), atol=1e-6)


def test_cauchy_cdf_values():
    c = dist.cauchy(0, 1)
    assert dist.cdf(c, 0.0) == 0.5
    assert dist.cdf(c, 1.0) == pytest.approx(0.75, rel=1e-15)
    assert dist.cdf(c, 0.2) == pytest.approx(0.5 + math.atan(0.2) / math.pi, rel=1e-15)
    assert dist.cdf(c, 0.2) == pytest.approx(0.5628330, abs=1e-7)


@given(
    params=st.sampled_from(FAMILIES),
    a=st.floats(-1e3, 1e3),
    b=st.floats(-1e3, 1e3),
)
def test_cdf_monotone(params, a, b):
    lo, hi = min(a, b), max(a, b)
    assert dist.cdf(params, lo) <= dist.cdf(params, hi)
    assert 0.0 <= dist.cdf(params, lo) <= 1.0


@given(x=st.floats(-50, 50), scale=st.floats(0.01, 100))
def test_student_t_one_dof_equals_cauchy_pointwise(x, scale):
    t1 = dist.student_t(1, 0, scale)
    c = dist.cauchy(0, scale)
    assert abs(dist.pdf(t1, x) - dist.pdf(c, x)) <= 1e-12


@pytest.mark.parametrize("params", FAMILIES, ids=str)
def test_sampling_matches_cdf(params):
    rng = np.random.default_rng(99)
    x = dist.sample(params, rng, 100_000)
    ks = stats.kstest(x, lambda q: dist.cdf(params, q)).statistic
    assert ks < 0.01


def test_normal_sample_mean():
    x = dist.sample(dist.normal(0, 1), np.random.default_rng(1), 100_000)
    assert abs(x.mean()) < 0.02


def test_half_cauchy_sample_support():
    x = dist.sample(dist.half_cauchy(1), np.random.default_rng(2), 10_000)
    assert x.min() >= 0


def test_sampling_is_deterministic():
    p = dist.cauchy(0, 1)
    a = dist.sample(p, np.random.default_rng(5), 100)
    b = dist.sample(p, np.random.default_rng(5), 100)
    assert np.array_equal(a, b)


def test_t_tail_probability():
    assert dist.t_tail_probability(0.0, 4) == 0.5
    assert dist.t_tail_probability(0.0, 1e5) == 0.5
    assert dist.t_tail_probability(1.0, 1) == pytest.approx(0.25, rel=1e-14)
    assert dist.t_tail_probability(1e12, 5) == pytest.approx(0.0, abs=1e-50)
    assert dist.t_two_sided_p(-1.0, 1) == pytest.approx(0.5, rel=1e-14)


def test_t_tail_matches_scipy():
    for t, v in [(2.5703, 9), (-1.2, 3.3), (4.0, 100)]:
        assert dist.t_tail_probability(t, v) == pytest.approx(stats.t.sf(t, v), rel=1e-12)


@pytest.mark.parametrize(
    "bad",
    [
        lambda: dist.cauchy(0, 0),
        lambda: dist.normal(0, -1),
        lambda: dist.student_t(0),
        lambda: dist.DistParams(dist.Family.STUDENT_T, 0, 1, None),
        lambda: dist.cauchy(math.nan, 1),
        lambda: dist.pdf(dist.cauchy(), math.inf),
        lambda: dist.pdf(dist.normal(), math.nan),
        lambda: dist.t_tail_probability(1.0, 0),
        lambda: dist.sample(dist.normal(), np.random.default_rng(0), 0),
    ],
)
def test_parameter_errors(bad):
    with pytest.raises(ParameterError):
        bad()
