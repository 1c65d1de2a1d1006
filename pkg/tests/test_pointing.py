import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import integrate, stats

from hapfso import oracles
from hapfso.pointing import (BeamParams, DegenerateJitterError, JitterParams, PointingConstants,
                             beam_waist_at, conditional_pl_cdf, conditional_pl_pdf,
                             displacement_pdf, pointing_constants, pointing_loss,
                             waist_for_received_width)

LAM = 1550e-9
WAIST_2CM_20KM = 0.49378552398862047  # mpmath, 40 digits


def test_beam_waist_at_20km():
    assert beam_waist_at(BeamParams(0.02, LAM), 20e3) == pytest.approx(WAIST_2CM_20KM, rel=1e-13)


def test_beam_waist_at_origin():
    assert beam_waist_at(BeamParams(0.03, LAM, 2.0), 0.0) == pytest.approx(0.03)


def test_beam_waist_negative_distance():
    with pytest.raises(ValueError):
        beam_waist_at(BeamParams(0.02, LAM), -1.0)


def test_epsilon_from_coherence_length():
    b = BeamParams.with_coherence_length(0.02, LAM, 0.5)
    assert b.epsilon == pytest.approx(1 + 2 * 0.02 ** 2 / 0.25)


@given(st.floats(0.2, 5.0), st.floats(1e3, 40e3), st.floats(0.05, 1e4))
def test_received_width_round_trip(w_z, z, rho0):
    c = LAM * z / math.pi
    assume(w_z ** 2 - 2 * c ** 2 / rho0 ** 2 > 2.05 * c)
    w0 = waist_for_received_width(w_z, z, LAM, rho0)
    beam = BeamParams.with_coherence_length(w0, LAM, rho0)
    assert beam_waist_at(beam, z) == pytest.approx(w_z, rel=1e-8)


def test_received_width_unreachable():
    with pytest.raises(ValueError):
        waist_for_received_width(0.05, 20e3, LAM)


def test_c1_equals_disc_integral_on_axis():
    for ratio in (10.0, 20.0, 50.0):
        w = 1.0
        pc = pointing_constants(w, w / ratio, JitterParams(0.4, 0.0, 0.01))
        exact = oracles.disc_power_fraction(w, w / ratio, 0.0)
        # relative gap is x/2 + O(x^2) with x = 2 r_a^2 / w^2
        assert abs(pc.c1 - exact) / exact < 1.01 / ratio ** 2


def test_pointing_loss_vs_disc_quadrature_ratio_20():
    w, ra = 1.0, 0.05
    rs = np.linspace(0, 2 * w, 41)
    exact = np.array([oracles.disc_power_fraction(w, ra, r) for r in rs])
    err = np.abs(pointing_loss(w, ra, rs) - exact) / exact[0]
    assert err.max() < 0.01


def test_pointing_loss_agreement_improves_with_ratio():
    errs = []
    for ratio in (5, 10, 20, 50):
        w, ra = 1.0, 1.0 / ratio
        rs = np.linspace(0, 2 * w, 21)
        exact = np.array([oracles.disc_power_fraction(w, ra, r) for r in rs])
        errs.append(np.max(np.abs(pointing_loss(w, ra, rs) - exact)) / exact[0])
    assert np.all(np.diff(errs) < 0)


def test_pointing_loss_clipped_and_tilted():
    assert pointing_loss(0.05, 0.05, 0.0) == 1.0
    assert pointing_loss(1.0, 0.05, 0.0, 0.5) == pytest.approx(0.005 * math.cos(0.5))


def test_pointing_constants_values():
    pc = pointing_constants(1.0, 0.05, JitterParams(0.3, 0.4, 0.01))
    assert pc.c1 == pytest.approx(0.005)
    assert pc.c2 == pytest.approx(2.0)
    assert pc.c3 == pytest.approx(1.0 / (4 * 0.25))


def test_pointing_constants_warn_near_field():
    with pytest.warns(UserWarning, match="far-field"):
        pointing_constants(0.2, 0.05, JitterParams(0.1, 0.0, 0.01))


def test_degenerate_jitter():
    with pytest.raises(DegenerateJitterError):
        pointing_constants(1.0, 0.05, JitterParams(0.0, 0.0, 0.01))
    with pytest.raises(DegenerateJitterError):
        displacement_pdf(JitterParams(0.0, 0.0, 0.0), 0.1)


def test_displacement_matches_sampling():
    jit = JitterParams(0.3, 0.2, 0.0)
    rng = np.random.default_rng(5)
    n = 1_000_000
    d = rng.normal(0, 1, (4, n))
    r = np.hypot(0.3 * d[0] + 0.2 * d[1], 0.3 * d[2] + 0.2 * d[3])
    cdf = lambda x: 1 - np.exp(-x ** 2 / (2 * jit.sigma_r_sq))
    assert stats.kstest(r, cdf).statistic < 0.005
    grid = np.linspace(0, 2, 2001)
    assert integrate.trapezoid(displacement_pdf(jit, grid), grid) == pytest.approx(1.0, abs=1e-4)


def test_conditional_pl_matches_sampling():
    w, ra = 1.5, 0.05
    jit = JitterParams(0.4, 0.25, 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pc = pointing_constants(w, ra, jit)
    rng = np.random.default_rng(9)
    r = rng.rayleigh(jit.sigma_r, 1_000_000)
    h = pointing_loss(w, ra, r)
    assert stats.kstest(h, lambda x: conditional_pl_cdf(pc, x)).statistic < 0.01


@given(st.floats(0.1, 20.0), st.floats(1e-3, 1.0), st.floats(0.0, 0.3))
def test_conditional_pl_pdf_mass(c3, c1, theta):
    pc = PointingConstants(c1, 2.0, c3)
    top = c1 * math.cos(theta)
    # substitute h = top * v^(1/c3) to integrate the power law exactly
    v = np.linspace(1e-9, 1.0, 20001)
    h = top * v ** (1 / c3)
    dh_dv = top / c3 * v ** (1 / c3 - 1)
    mass = integrate.trapezoid(conditional_pl_pdf(pc, theta, h) * dh_dv, v)
    assert mass == pytest.approx(math.cos(theta) ** (c3 + 1), rel=1e-4)


def test_conditional_pl_pdf_zero_outside_support():
    pc = PointingConstants(0.01, 2.0, 1.5)
    assert conditional_pl_pdf(pc, 0.0, 0.02) == 0.0
    assert conditional_pl_pdf(pc, 0.0, -1.0) == 0.0


def test_jitter_validation():
    with pytest.raises(ValueError):
        JitterParams(-0.1, 0.0, 0.0)
