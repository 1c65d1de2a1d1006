import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from hapfso import oracles, turbulence
from hapfso.turbulence import GammaGamma, LogNormal, gg_params_from_rytov


def _integrate(f):
    pieces = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 20.0, np.inf]
    return sum(integrate.quad(f, a, b, epsabs=1e-13, limit=400)[0] for a, b in zip(pieces, pieces[1:]))


def test_gg_mapping_unit_rytov():
    a, b = gg_params_from_rytov(1.0)
    ref_a = 1 / (math.exp(0.49 / 1.56 ** (7 / 6)) - 1)
    ref_b = 1 / (math.exp(0.51 / 1.69 ** (5 / 6)) - 1)
    assert (a, b) == pytest.approx((ref_a, ref_b), rel=1e-13)
    assert (a, b) == pytest.approx(oracles.gg_params_mp(1.0), rel=1e-13)


def test_alpha_exceeds_beta_on_log_grid():
    for s in np.geomspace(1e-3, 1e2, 200):
        a, b = gg_params_from_rytov(s)
        assert a > b


def test_gg_mapping_rejects_zero():
    with pytest.raises(ValueError):
        gg_params_from_rytov(0.0)


@pytest.mark.parametrize("model", [LogNormal(0.25), LogNormal(0.05), GammaGamma(4.0, 2.0),
                                   GammaGamma.from_rytov(0.18), GammaGamma(1.2, 0.8)])
def test_pdf_normalized_with_unit_mean(model):
    f = lambda h: float(turbulence.pdf(model, h))
    assert _integrate(f) == pytest.approx(1.0, abs=1e-6)
    assert _integrate(lambda h: h * f(h)) == pytest.approx(1.0, abs=1e-6)


def test_lognormal_parameters():
    m = LogNormal(0.25)
    assert m.log_mean == pytest.approx(-0.5)
    assert m.log_std == pytest.approx(1.0)


def test_weak_gg_pdf_finite():
    # alpha, beta in the thousands overflow a naive (alpha beta)^((alpha+beta)/2)
    m = GammaGamma.from_rytov(1e-3)
    vals = turbulence.pdf(m, np.array([0.9, 1.0, 1.1]))
    assert np.all(np.isfinite(vals)) and vals[1] > vals[0]


def test_pdf_rejects_nonpositive():
    with pytest.raises(ValueError):
        turbulence.pdf(LogNormal(0.1), 0.0)


@pytest.mark.parametrize("model", [LogNormal(0.25), GammaGamma(4.0, 2.0)])
def test_sampler_ks(model):
    x = turbulence.sample(model, np.random.default_rng(3), 100_000)
    ks = stats.kstest(x, lambda t: turbulence.cdf(model, t)).statistic
    assert ks < 0.01


def test_lognormal_sample_mean():
    x = turbulence.sample(LogNormal(0.25), np.random.default_rng(0), 1_000_000)
    assert x.mean() == pytest.approx(1.0, abs=0.01)


def test_gamma_gamma_sample_moments():
    a, b = 4.0, 2.0
    x = turbulence.sample(GammaGamma(a, b), np.random.default_rng(0), 1_000_000)
    assert x.mean() == pytest.approx(1.0, abs=0.01)
    assert x.var() == pytest.approx(1 / a + 1 / b + 1 / (a * b), rel=0.05)


def test_sampler_reproducible():
    m = GammaGamma(3.0, 2.0)
    a = turbulence.sample(m, np.random.default_rng(11), 1000)
    b = turbulence.sample(m, np.random.default_rng(11), 1000)
    assert np.array_equal(a, b)


@given(st.floats(0.05, 1.0), st.floats(0.1, 1.5))
def test_lognormal_negative_moment_matches_quadrature(s2, order):
    m = LogNormal(s2)
    ref = _integrate(lambda h: h ** (-order) * float(turbulence.pdf(m, h)) if h > 0 else 0.0)
    assert turbulence.negative_moment(m, order) == pytest.approx(ref, rel=1e-5)


@given(st.floats(2.5, 10.0), st.floats(2.5, 10.0), st.floats(0.1, 2.0))
def test_gg_negative_moment_matches_quadrature(a, b, order):
    m = GammaGamma(a, b)
    ref = _integrate(lambda h: h ** (-order) * float(turbulence.pdf(m, h)) if h > 0 else 0.0)
    assert turbulence.negative_moment(m, order) == pytest.approx(ref, rel=1e-5)


def test_gg_negative_moment_diverges():
    assert turbulence.negative_moment(GammaGamma(4.0, 2.0), 2.0) == math.inf


@pytest.mark.parametrize("model", [LogNormal(0.2), GammaGamma(4.0, 2.0)])
def test_second_moment(model):
    ref = _integrate(lambda h: h * h * float(turbulence.pdf(model, h)))
    assert turbulence.second_moment(model) == pytest.approx(ref, rel=1e-7)


def test_gg_cdf_monotone_and_bounded():
    m = GammaGamma.from_rytov(0.5)
    h = np.array([3.0, 0.1, 1.0, 0.5, 10.0])
    c = turbulence.cdf(m, h)
    order = np.argsort(h)
    assert np.all(np.diff(c[order]) >= 0)
    assert 0 < c.min() and c.max() <= 1.0
