"""Altitude-dependent turbulence strength and slant-path integrals.

Everything here is a pure function of its arguments. Altitudes are in meters
above ground, slant distances in meters along the line of sight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

# Points where the Hufnagel-Valley terms change character; quad converges much
# faster when the boundary layer and the tropopause bump are split out.
_PROFILE_BREAKS = (50.0, 100.0, 300.0, 1000.0, 3000.0, 7000.0, 10_000.0, 15_000.0)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved_abserr: float):
        super().__init__(f"{message} (achieved abs. error {achieved_abserr:.3e})")
        self.achieved_abserr = achieved_abserr


@dataclass(frozen=True)
class LinkGeometry:
    hap_altitude_m: float
    tx_altitude_m: float = 0.0
    zenith_angle_rad: float = math.radians(40.0)

    def __post_init__(self):
        if not self.hap_altitude_m > self.tx_altitude_m >= 0.0:
            raise ValueError("need hap_altitude_m > tx_altitude_m >= 0")
        if not 0.0 <= self.zenith_angle_rad < math.pi / 2:
            raise ValueError("zenith angle must lie in [0, pi/2)")

    @classmethod
    def from_path_length(cls, path_length_m: float, zenith_angle_rad: float,
                         tx_altitude_m: float = 0.0) -> "LinkGeometry":
        """Geometry for a given slant length Z instead of a platform altitude."""
        height = path_length_m * math.cos(zenith_angle_rad)
        return cls(tx_altitude_m + height, tx_altitude_m, zenith_angle_rad)

    @property
    def sec_zenith(self) -> float:
        return 1.0 / math.cos(self.zenith_angle_rad)

    @property
    def path_length_m(self) -> float:
        return (self.hap_altitude_m - self.tx_altitude_m) * self.sec_zenith

    def slant_distance(self, altitude_m):
        """Distance along the path from the transmitter to the given altitude."""
        return (np.asarray(altitude_m) - self.tx_altitude_m) * self.sec_zenith


@dataclass(frozen=True)
class AtmosphereProfile:
    rms_wind_speed_mps: float = 21.0
    ground_cn2: float = 1.7e-13
    attenuation_coeff_per_m: float = 0.0

    def __post_init__(self):
        if self.rms_wind_speed_mps <= 0 or self.ground_cn2 <= 0:
            raise ValueError("wind speed and ground Cn2 must be positive")
        if self.attenuation_coeff_per_m < 0:
            raise ValueError("attenuation coefficient must be non-negative")


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if not 0 < self.relative_tolerance <= 1e-3:
            raise ValueError("relative_tolerance must lie in (0, 1e-3]")
        if self.max_subdivisions < 16:
            raise ValueError("max_subdivisions must be >= 16")


DEFAULT_QUAD = QuadratureSpec()


def cn2_at(altitude_m, profile: AtmosphereProfile):
    """Hufnagel-Valley refractive-index structure parameter C_n^2(l).

    Accepts scalars or arrays; returns values in m^(-2/3).
    """
    l = np.asarray(altitude_m, dtype=float)
    if np.any(l < 0):
        raise ValueError("altitude must be non-negative")
    v = profile.rms_wind_speed_mps
    out = (0.00594 * (v / 27.0) ** 2 * (1e-5 * l) ** 10 * np.exp(-l / 1000.0)
           + 2.7e-16 * np.exp(-l / 1500.0)
           + profile.ground_cn2 * np.exp(-l / 100.0))
    return out if out.ndim else float(out)


def _breakpoints(lo: float, hi: float) -> list[float]:
    return [b for b in _PROFILE_BREAKS if lo < b < hi]


def adaptive_integral(func: Callable[[float], float], lo: float, hi: float,
                      quad: QuadratureSpec = DEFAULT_QUAD, what: str = "integral") -> float:
    """QUADPACK integral over [lo, hi] split at the profile breakpoints.

    Raises QuadratureError when any piece fails to converge within
    ``quad.max_subdivisions`` intervals.
    """
    if hi <= lo:
        return 0.0
    edges = [lo, *_breakpoints(lo, hi), hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        res = integrate.quad(func, a, b, epsabs=0.0, epsrel=quad.relative_tolerance,
                             limit=quad.max_subdivisions, full_output=1)
        val, err = res[0], res[1]
        if len(res) > 3:  # QUADPACK returned a nonzero status and a message
            raise QuadratureError(f"{what} did not converge on [{a:g}, {b:g}]: {res[3]}", err)
        total += val
    return total


def rytov_variance(geom: LinkGeometry, profile: AtmosphereProfile, wavelength_m: float,
                   quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Slant-path Rytov variance sigma_Bu^2 (dimensionless)."""
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    h0, H = geom.tx_altitude_m, geom.hap_altitude_m
    span = H - h0
    k = 2 * math.pi / wavelength_m

    def integrand(l):
        x = (l - h0) / span
        return cn2_at(l, profile) * ((1 - x) * x) ** (5 / 6)

    integral = adaptive_integral(integrand, h0, H, quad, "Rytov variance")
    return 2.25 * k ** (7 / 6) * span ** (5 / 6) * geom.sec_zenith ** (11 / 6) * integral


def beam_wander_variance(geom: LinkGeometry, profile: AtmosphereProfile,
                         beam_waist_fn: Callable[[float], float],
                         quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Beam-wander variance sigma_b^2 in m^2.

    ``beam_waist_fn`` maps a slant distance s (m) to the beam radius there.
    Altitude l is converted to s = (l - h0) sec(zeta), so the path factor is
    (Z - s)^2 rather than a mix of distance and altitude.
    """
    h0, H = geom.tx_altitude_m, geom.hap_altitude_m
    Z = geom.path_length_m

    def integrand(l):
        s = (l - h0) * geom.sec_zenith
        return cn2_at(l, profile) * (Z - s) ** 2 * beam_waist_fn(s) ** (-1 / 3)

    return 2.07 * adaptive_integral(integrand, h0, H, quad, "beam-wander variance")


def coherence_length(geom: LinkGeometry, profile: AtmosphereProfile, wavelength_m: float,
                     quad: QuadratureSpec = DEFAULT_QUAD, form: str = "printed") -> float:
    """Coherence length rho_0 used in the beam-spread factor epsilon.

    form="printed" integrates (0.55 Cn2(l) k^2 l)^(-3/5) over altitude with the
    lower limit clamped to max(h0, 1 m); the integrand diverges at l = 0.
    form="standard" is the spherical-wave expression
    [1.46 k^2 sec(zeta) int Cn2(l) ((l - h0)/(H - h0))^(5/3) dl]^(-3/5).
    """
    k = 2 * math.pi / wavelength_m
    h0, H = geom.tx_altitude_m, geom.hap_altitude_m
    if form == "printed":
        lo = max(h0, 1.0)

        def integrand(l):
            return (0.55 * cn2_at(l, profile) * k ** 2 * l) ** (-3 / 5)

        return adaptive_integral(integrand, lo, H, quad, "coherence length")
    if form == "standard":
        span = H - h0

        def integrand(l):
            return cn2_at(l, profile) * ((l - h0) / span) ** (5 / 3)

        integral = adaptive_integral(integrand, h0, H, quad, "coherence length")
        return (1.46 * k ** 2 * geom.sec_zenith * integral) ** (-3 / 5)
    raise ValueError(f"unknown coherence-length form {form!r}")


def attenuation_loss(geom: LinkGeometry, profile: AtmosphereProfile) -> float:
    """Beers-Lambert attenuation exp(-Z xi)."""
    return math.exp(-geom.path_length_m * profile.attenuation_coeff_per_m)


def waist_from_aperture(diameter_m: float) -> float:
    """Transmit beam waist for an aperture of diameter D: D / (sqrt(2) pi)."""
    return diameter_m / (math.sqrt(2) * math.pi)
