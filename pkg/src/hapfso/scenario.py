"""One-stop link description and the quantities derived from it.

``LinkDesign`` holds every input the analysis needs; ``derive`` runs the
slant-path integrals once and returns the constants consumed by the closed
forms, the Monte-Carlo oracle and the optimizers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

from . import atmosphere as atm
from .aoa import ReceiverFov
from .channel import (OutageQuery, ReceiverElectronics, background_power, noise_variance,
                      outage_closed_form, outage_terms)
from .pointing import (BeamParams, JitterParams, PointingConstants, beam_waist_at,
                       pointing_constants, waist_for_received_width)
from .turbulence import GammaGamma, LogNormal, TurbulenceModel


def table1_receiver() -> ReceiverElectronics:
    return ReceiverElectronics(
        responsivity=0.9,
        electrical_bandwidth_hz=1e9,
        optical_bandwidth_m=10e-9,
        background_radiance=ReceiverElectronics.radiance_from_w_per_cm2_m_sr(1e-3),
        electron_charge=1.6e-19,
    )


@dataclass(frozen=True)
class LinkDesign:
    """All inputs of a ground-to-HAP link.

    Defaults reproduce the nominal environment (1550 nm, 20 km slant path at
    40 degrees zenith, HV profile with V_w = 21 m/s and C_n^2(0) = 1.7e-13) and
    the w_Z/r_a = 20, theta_FOV = 75 mrad, sigma_d = 0.4 m outage scenario.
    ``sigma_b_m`` overrides the beam-wander integral when set; ``turbulence``
    overrides the Rytov-derived fading model when set.
    """

    geometry: atm.LinkGeometry = field(
        default_factory=lambda: atm.LinkGeometry.from_path_length(20e3, math.radians(40)))
    atmosphere: atm.AtmosphereProfile = field(default_factory=atm.AtmosphereProfile)
    rx: ReceiverElectronics = field(default_factory=table1_receiver)
    wavelength_m: float = 1550e-9
    aperture_radius_m: float = 0.05
    w_z_m: float = 1.0
    theta_fov_rad: float = 0.075
    focal_length_m: float = 0.1
    sigma_d_m: float = 0.4
    sigma_o_rad: float = 0.010
    sigma_b_m: Optional[float] = None
    turbulence_kind: str = "gg"
    turbulence: Optional[TurbulenceModel] = None
    p_t_dbm: float = 5.0
    snr_threshold_db: float = 10.0
    coherence_form: str = "printed"
    quad: atm.QuadratureSpec = field(default_factory=atm.QuadratureSpec)

    def __post_init__(self):
        if self.turbulence_kind not in ("gg", "ln"):
            raise ValueError("turbulence_kind must be 'gg' or 'ln'")
        if self.aperture_radius_m <= 0 or self.w_z_m <= 0:
            raise ValueError("aperture radius and w_Z must be positive")
        if not 0 < self.theta_fov_rad < math.pi:
            raise ValueError("theta_fov must lie in (0, pi)")

    def replace(self, **changes) -> "LinkDesign":
        return replace(self, **changes)

    def with_zenith(self, zenith_rad: float) -> "LinkDesign":
        g = self.geometry
        return replace(self, geometry=atm.LinkGeometry(g.hap_altitude_m, g.tx_altitude_m, zenith_rad))

    @property
    def aperture_area_m2(self) -> float:
        return math.pi * self.aperture_radius_m ** 2

    @property
    def fov(self) -> ReceiverFov:
        return ReceiverFov.from_theta(self.theta_fov_rad, self.focal_length_m)

    @property
    def query(self) -> OutageQuery:
        return OutageQuery.from_dbm(self.p_t_dbm, self.snr_threshold_db)

    def derive(self) -> "Derived":
        return _derive(self)

    def outage(self) -> float:
        d = self.derive()
        return outage_closed_form(d.model, d.pc, d.h_al, self.theta_fov_rad, self.sigma_o_rad, d.h_th)

    def outage_terms(self) -> tuple[float, float]:
        d = self.derive()
        return outage_terms(d.model, d.pc, d.h_al, self.theta_fov_rad, self.sigma_o_rad, d.h_th)


@dataclass(frozen=True)
class Derived:
    path_length_m: float
    sigma_bu_sq: float
    model: TurbulenceModel
    rho0_m: float
    w0_m: float
    beam: BeamParams
    jitter: JitterParams
    pc: Optional[PointingConstants]
    h_al: float
    p_b_w: float
    sigma_n_sq: float
    h_th: float


@lru_cache(maxsize=256)
def _rytov(geom, profile, wavelength_m, quad):
    return atm.rytov_variance(geom, profile, wavelength_m, quad)


@lru_cache(maxsize=256)
def _rho0(geom, profile, wavelength_m, quad, form):
    return atm.coherence_length(geom, profile, wavelength_m, quad, form)


@lru_cache(maxsize=4096)
def _sigma_b_sq(geom, profile, beam, quad):
    return atm.beam_wander_variance(geom, profile, lambda s: beam_waist_at(beam, s), quad)


def _derive(d: LinkDesign) -> Derived:
    geom = d.geometry
    Z = geom.path_length_m
    s2 = _rytov(geom, d.atmosphere, d.wavelength_m, d.quad)
    if d.turbulence is not None:
        model = d.turbulence
    elif d.turbulence_kind == "ln":
        model = LogNormal(s2)
    else:
        model = GammaGamma.from_rytov(s2)
    rho0 = _rho0(geom, d.atmosphere, d.wavelength_m, d.quad, d.coherence_form)
    w0 = waist_for_received_width(d.w_z_m, Z, d.wavelength_m, rho0)
    beam = BeamParams.with_coherence_length(w0, d.wavelength_m, rho0)
    if d.sigma_b_m is None:
        sigma_b = math.sqrt(_sigma_b_sq(geom, d.atmosphere, beam, d.quad))
    else:
        sigma_b = d.sigma_b_m
    jitter = JitterParams(d.sigma_d_m, sigma_b, d.sigma_o_rad)
    pc = None
    if jitter.sigma_r_sq > 0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pc = pointing_constants(d.w_z_m, d.aperture_radius_m, jitter)
    h_al = atm.attenuation_loss(geom, d.atmosphere)
    p_b = float(background_power(d.theta_fov_rad, d.rx, d.aperture_area_m2))
    sn2 = float(noise_variance(d.rx, p_b))
    return Derived(Z, s2, model, rho0, w0, beam, jitter, pc, h_al, p_b, sn2,
                   float(d.query.h_th(d.rx, sn2)))
