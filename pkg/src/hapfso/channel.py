"""Composite channel statistics, link metrics and closed-form outage.

The composite gain is h = h_al * h_at * h_pl * h_af. For small h the
pointing-loss power law dominates, so the density of h_ag = h_al h_at h_pl is
proportional to h_ag^(C3 - 1); the gated AOA factor adds a point mass at zero.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .aoa import solid_angle
from .pointing import PointingConstants
from .turbulence import GammaGamma, LogNormal, TurbulenceModel

log = logging.getLogger(__name__)

ELECTRON_CHARGE = 1.6e-19
POLE_GUARD = 1e-9


class ParameterRegionError(ValueError):
    """Closed form undefined: Gamma-function argument at or below zero."""


class ValidityWarning(UserWarning):
    """h_th lies outside the region where the small-h power law is accurate."""


@dataclass(frozen=True)
class ReceiverElectronics:
    """Receiver electronics and optical filter, SI units throughout.

    ``background_radiance`` is in W m^-2 m^-1 sr^-1 (per unit aperture area,
    per meter of optical bandwidth, per steradian).
    """

    responsivity: float = 0.9
    electrical_bandwidth_hz: float = 1e9
    optical_bandwidth_m: float = 10e-9
    background_radiance: float = 10.0
    electron_charge: float = ELECTRON_CHARGE

    def __post_init__(self):
        for name in ("responsivity", "electrical_bandwidth_hz", "optical_bandwidth_m",
                     "background_radiance", "electron_charge"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @staticmethod
    def radiance_from_w_per_cm2_m_sr(value: float) -> float:
        """Convert N_b quoted in W/cm^2-m-sr to SI W/m^2-m-sr."""
        si = value * 1e4
        log.debug("background radiance %g W/cm^2-m-sr -> %g W/m^2-m-sr", value, si)
        return si


@dataclass(frozen=True)
class LinkState:
    h_al: float
    h_at: float
    h_pl: float
    h_af: float

    @property
    def h_ag(self) -> float:
        return self.h_al * self.h_at * self.h_pl

    @property
    def h(self) -> float:
        return self.h_ag * self.h_af


@dataclass(frozen=True)
class OutageQuery:
    transmit_power_w: float
    snr_threshold: float

    def __post_init__(self):
        if self.transmit_power_w <= 0 or self.snr_threshold <= 0:
            raise ValueError("transmit power and SNR threshold must be positive")

    @classmethod
    def from_dbm(cls, p_t_dbm: float, snr_threshold_db: float) -> "OutageQuery":
        return cls(dbm_to_watts(p_t_dbm), 10 ** (snr_threshold_db / 10))

    def h_th(self, rx: ReceiverElectronics, sigma_n_sq: float) -> float:
        return math.sqrt(self.snr_threshold * sigma_n_sq) / (rx.responsivity * self.transmit_power_w)


def dbm_to_watts(p_dbm):
    return 1e-3 * 10 ** (np.asarray(p_dbm, dtype=float) / 10)


def watts_to_dbm(p_w):
    return 10 * np.log10(np.asarray(p_w, dtype=float) / 1e-3)


def background_power(theta_fov_rad, rx: ReceiverElectronics, aperture_area_m2: float):
    """P_b = N_b B_o Omega_FOV A_r in watts."""
    return rx.background_radiance * rx.optical_bandwidth_m * solid_angle(theta_fov_rad) * aperture_area_m2


def noise_variance(rx: ReceiverElectronics, p_b):
    """Background-limited shot-noise variance 2 e B_e eta P_b (A^2)."""
    return 2.0 * rx.electron_charge * rx.electrical_bandwidth_hz * rx.responsivity * p_b


def snr(h, query: OutageQuery, rx: ReceiverElectronics, sigma_n_sq: float):
    """Instantaneous electrical SNR eta^2 P_t^2 h^2 / sigma_n^2."""
    if sigma_n_sq <= 0:
        raise ValueError("noise variance must be positive")
    return (rx.responsivity * query.transmit_power_w) ** 2 * np.square(h) / sigma_n_sq


def aoa_floor(theta_fov_rad, sigma_o_rad):
    """Point mass at h = 0: probability the beam falls outside the FOV."""
    return np.exp(-np.square(theta_fov_rad) / (2.0 * sigma_o_rad ** 2))


def _gamma_args(model: GammaGamma, c3: float) -> tuple[float, float, float]:
    """Gamma arguments of the GG closed form, guarding the poles.

    Returns (c3, arg1, arg2) with c3 possibly nudged off a pole.
    """
    a, b = model.alpha, model.beta
    c5 = (a + b - 2 * c3 - 2) / 2
    args = [(2 * c5 + 2 + a - b) / 2, (2 * c5 + 2 + b - a) / 2]
    if min(args) > -POLE_GUARD:
        for g in args:
            if abs(g) < POLE_GUARD:
                nudged = c3 * (1 - POLE_GUARD) - POLE_GUARD
                log.warning("C3=%.12g puts a Gamma argument on a pole; nudged to %.12g", c3, nudged)
                return _gamma_args(model, nudged)
    if min(args) <= 0:
        raise ParameterRegionError(
            f"C3={c3:.4g} >= min(alpha, beta)=({a:.4g}, {b:.4g}): the small-h density is "
            "turbulence-dominated and the pointing power law does not apply "
            f"(Gamma arguments {args[0]:.4g}, {args[1]:.4g})")
    return c3, args[0], args[1]


def composite_coefficient(model: TurbulenceModel, pc: PointingConstants, h_al: float) -> tuple[float, float]:
    """Coefficient K and exponent C3 of f_{h_ag|theta_d=0}(h) = K h^(C3 - 1).

    Evaluated term by term from the printed LN and GG expressions; the GG
    normalization uses Gamma(alpha) Gamma(beta).
    """
    c1, c3 = pc.c1, pc.c3
    if isinstance(model, LogNormal):
        s2 = model.sigma_bu_sq
        k = (c3 * c1 ** (-c3) / (2 * h_al ** c3 * math.sqrt(2 * math.pi * s2))
             * math.sqrt(8 * math.pi * s2)
             * math.exp(8 * s2 * (((2 * c3 + 1) / 4) ** 2 - 1 / 16)))
        return k, c3
    c3, g1, g2 = _gamma_args(model, c3)
    a, b = model.alpha, model.beta
    c5 = (a + b - 2 * c3 - 2) / 2
    # log-space: (alpha beta)^((alpha+beta)/2) overflows for weak turbulence
    log_c4 = (math.log(2 * c3) + 0.5 * (a + b) * math.log(a * b) - c3 * math.log(h_al)
              - special.gammaln(a) - special.gammaln(b))
    log_k = ((2 * c5 + 1) * math.log(2) - c3 * math.log(c1) + log_c4
             - (c5 + 1) * math.log(4 * a * b) + special.gammaln(g1) + special.gammaln(g2))
    return math.exp(log_k), c3


def conditional_composite_pdf(model: TurbulenceModel, pc: PointingConstants, h_al: float,
                              theta_d, h_ag):
    """Small-h density of h_ag = h_al h_at h_pl given the AOA deviation theta_d."""
    k, c3 = composite_coefficient(model, pc, h_al)
    h = np.asarray(h_ag, dtype=float)
    out = np.where(h > 0, k * np.where(h > 0, h, 1.0) ** (c3 - 1) * np.cos(theta_d), 0.0)
    return out if out.ndim else float(out)


def channel_pdf_smooth(model: TurbulenceModel, pc: PointingConstants, h_al: float,
                       theta_fov_rad: float, sigma_o_rad: float, h):
    """Continuous part f'_h of the channel density (small-angle form).

    The remaining mass aoa_floor(theta_fov, sigma_o) sits at h = 0.
    """
    capture = 1.0 - aoa_floor(theta_fov_rad, sigma_o_rad)
    return conditional_composite_pdf(model, pc, h_al, 0.0, h) * capture


def outage_terms(model: TurbulenceModel, pc: PointingConstants, h_al: float,
                 theta_fov_rad: float, sigma_o_rad: float, h_th: float) -> tuple[float, float]:
    """(floor, smooth) parts of the closed-form outage, unclamped."""
    floor = float(aoa_floor(theta_fov_rad, sigma_o_rad))
    k, c3 = composite_coefficient(model, pc, h_al)
    return floor, k * h_th ** c3 / c3 * (1.0 - floor)


def validity_limit(model: TurbulenceModel, pc: PointingConstants, h_al: float) -> float:
    """h at which the analytic smooth CDF K h^C3 / C3 reaches 1/2."""
    k, c3 = composite_coefficient(model, pc, h_al)
    return (0.5 * c3 / k) ** (1.0 / c3)


def outage_closed_form(model: TurbulenceModel, pc: PointingConstants, h_al: float,
                       theta_fov_rad: float, sigma_o_rad: float, h_th: float) -> float:
    """Closed-form outage probability, clamped to [0, 1]."""
    if h_th <= 0:
        raise ValueError("h_th must be positive")
    floor, smooth = outage_terms(model, pc, h_al, theta_fov_rad, sigma_o_rad, h_th)
    if h_th > validity_limit(model, pc, h_al):
        warnings.warn(f"h_th={h_th:.3g} beyond the small-h validity region", ValidityWarning,
                      stacklevel=2)
    p = floor + smooth
    if p > 1.0:
        warnings.warn(f"unclamped outage {p:.3g} > 1; small-h approximation invalid",
                      ValidityWarning, stacklevel=2)
        return 1.0
    return p
