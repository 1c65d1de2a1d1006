import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hapfso import oracles
from hapfso.atmosphere import (AtmosphereProfile, LinkGeometry, QuadratureError, QuadratureSpec,
                               adaptive_integral, attenuation_loss, beam_wander_variance, cn2_at,
                               coherence_length, rytov_variance, waist_from_aperture)
from hapfso.pointing import BeamParams, beam_waist_at

LAM = 1550e-9
# frozen from hapfso.oracles (composite Gauss-Legendre, 1e4 panels; mpmath for Cn2)
CN2_10KM = 1.665731922101464e-17
RYTOV_TABLE1 = 0.18179300667882076
RHO0_PRINTED = 14836.377093962243
RHO0_STANDARD = 0.5745455686601245
WANDER_W0_2CM = 0.05165807137185944


@pytest.fixture
def geom():
    return LinkGeometry.from_path_length(20e3, math.radians(40))


def test_cn2_ground_value():
    p = AtmosphereProfile()
    assert cn2_at(0.0, p) == pytest.approx(1.7e-13 + 2.7e-16, rel=1e-12)


def test_cn2_matches_high_precision():
    assert cn2_at(10_000.0, AtmosphereProfile()) == pytest.approx(CN2_10KM, rel=1e-12)


def test_cn2_rejects_negative_altitude():
    with pytest.raises(ValueError):
        cn2_at(-1.0, AtmosphereProfile())


@given(st.floats(0, 40e3), st.floats(1, 60), st.floats(1e-15, 1e-12))
def test_cn2_agrees_with_mpmath(l, v, s):
    p = AtmosphereProfile(v, s)
    assert cn2_at(l, p) == pytest.approx(oracles.cn2_mp(l, p), rel=1e-10)


def test_geometry_from_path_length(geom):
    assert geom.hap_altitude_m == pytest.approx(20e3 * math.cos(math.radians(40)))
    assert geom.path_length_m == pytest.approx(20e3)


@pytest.mark.parametrize("kw", [dict(hap_altitude_m=100, tx_altitude_m=200),
                                dict(hap_altitude_m=1e4, zenith_angle_rad=math.pi / 2)])
def test_geometry_validation(kw):
    with pytest.raises(ValueError):
        LinkGeometry(**kw)


def test_rytov_table1(geom):
    assert rytov_variance(geom, AtmosphereProfile(), LAM) == pytest.approx(RYTOV_TABLE1, rel=1e-6)


def test_rytov_grows_with_zenith():
    p = AtmosphereProfile()
    vals = [rytov_variance(LinkGeometry(17e3, 0, math.radians(z)), p, LAM) for z in range(0, 80, 10)]
    assert np.all(np.diff(vals) > 0)


@given(st.floats(0.5e-6, 2e-6))
def test_rytov_wavelength_scaling(lam):
    g = LinkGeometry(17e3)
    p = AtmosphereProfile()
    ratio = rytov_variance(g, p, lam) / rytov_variance(g, p, LAM)
    assert ratio == pytest.approx((LAM / lam) ** (7 / 6), rel=1e-7)


def test_rytov_rejects_bad_wavelength(geom):
    with pytest.raises(ValueError):
        rytov_variance(geom, AtmosphereProfile(), 0.0)


def test_coherence_length_printed(geom):
    rho = coherence_length(geom, AtmosphereProfile(), LAM)
    assert rho == pytest.approx(RHO0_PRINTED, rel=1e-6)


def test_coherence_length_standard(geom):
    rho = coherence_length(geom, AtmosphereProfile(), LAM, form="standard")
    assert rho == pytest.approx(RHO0_STANDARD, rel=1e-6)


def test_coherence_length_unknown_form(geom):
    with pytest.raises(ValueError):
        coherence_length(geom, AtmosphereProfile(), LAM, form="other")


def test_beam_wander_w0_2cm(geom):
    beam = BeamParams(0.02, LAM)
    val = beam_wander_variance(geom, AtmosphereProfile(), lambda s: beam_waist_at(beam, s))
    assert val == pytest.approx(WANDER_W0_2CM, rel=1e-6)


def test_quadrature_error_reports_achieved_error():
    with pytest.raises(QuadratureError) as info:
        adaptive_integral(lambda x: math.sin(1 / x) / x, 1e-4, 1.0, QuadratureSpec(1e-10, 16))
    assert info.value.achieved_abserr > 0


@pytest.mark.parametrize("kw", [dict(relative_tolerance=0.0), dict(relative_tolerance=0.1),
                                dict(max_subdivisions=4)])
def test_quadrature_spec_validation(kw):
    with pytest.raises(ValueError):
        QuadratureSpec(**kw)


def test_attenuation():
    g = LinkGeometry.from_path_length(20e3, 0.3)
    assert attenuation_loss(g, AtmosphereProfile()) == 1.0
    assert attenuation_loss(g, AtmosphereProfile(attenuation_coeff_per_m=1e-5)) == pytest.approx(
        math.exp(-0.2))


def test_waist_from_aperture():
    assert waist_from_aperture(0.1) == pytest.approx(0.1 / (math.sqrt(2) * math.pi))
